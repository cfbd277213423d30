/// Fixed-length transport delay on a sampled signal.
///
/// Each [`push`](DelayBuffer::push) returns the sample written exactly
/// `len` pushes earlier, or the rest value 0 while the buffer fills.
#[derive(Debug, Clone)]
pub struct DelayBuffer {
    samples: Vec<f64>,
    cursor: usize,
}

impl DelayBuffer {
    pub fn new(len: usize) -> Self {
        DelayBuffer {
            samples: vec![0.0; len],
            cursor: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn push(&mut self, value: f64) -> f64 {
        if self.samples.is_empty() {
            return value;
        }
        let out = std::mem::replace(&mut self.samples[self.cursor], value);
        self.cursor = (self.cursor + 1) % self.samples.len();
        out
    }
}
