use std::time::{Duration, Instant};

use serde::Serialize;

/// Wall-clock timings, kept out of reports so reports stay reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub command: String,
    pub seconds: f64,
    pub sections: Vec<Section>,
    #[serde(skip)]
    started: Option<Instant>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub name: String,
    pub seconds: f64,
}

impl Timing {
    pub fn start(command: &str) -> Self {
        Self {
            command: command.to_string(),
            seconds: 0.0,
            sections: Vec::new(),
            started: Some(Instant::now()),
        }
    }

    pub fn section(&mut self, name: &str, elapsed: Duration) {
        self.sections.push(Section {
            name: name.to_string(),
            seconds: elapsed.as_secs_f64(),
        });
    }

    pub fn finish(&mut self) {
        if let Some(t) = self.started {
            self.seconds = t.elapsed().as_secs_f64();
        }
    }
}
