use std::io::Write;

use serde::Serialize;

use crate::error::Result;

pub const TRAIN_LOG_HEADER: &str =
    "iteration,timesteps,mean_ep_reward,mean_ep_len,policy_loss,value_loss,wall_clock_s";

/// One training-log row. Episode statistics cover the most recent 100
/// completed episodes and are NaN until the first episode finishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub timesteps: usize,
    pub mean_ep_reward: f64,
    pub mean_ep_len: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub wall_clock_s: f64,
}

/// Receives one record per training iteration, from a single writer.
pub trait LogSink {
    fn record(&mut self, row: &IterationLog) -> Result<()>;
}

/// Collects rows in memory.
#[derive(Debug, Default, Clone)]
pub struct MemorySink {
    pub rows: Vec<IterationLog>,
}

impl LogSink for MemorySink {
    fn record(&mut self, row: &IterationLog) -> Result<()> {
        self.rows.push(*row);
        Ok(())
    }
}

/// Writes the training log as CSV. With `record_wall_clock` off the
/// wall-clock column is written as 0 so the file is reproducible byte for
/// byte.
pub struct CsvLogSink<W: Write> {
    writer: csv::Writer<W>,
    record_wall_clock: bool,
}

impl<W: Write> CsvLogSink<W> {
    pub fn new(writer: W, record_wall_clock: bool) -> Result<Self> {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        writer.write_record(TRAIN_LOG_HEADER.split(','))?;
        writer.flush().map_err(csv::Error::from)?;
        Ok(CsvLogSink {
            writer,
            record_wall_clock,
        })
    }

    pub fn into_inner(self) -> Result<W> {
        self.writer
            .into_inner()
            .map_err(|e| crate::Error::Csv(csv::Error::from(e.into_error())))
    }
}

impl<W: Write> LogSink for CsvLogSink<W> {
    fn record(&mut self, row: &IterationLog) -> Result<()> {
        let mut row = *row;
        if !self.record_wall_clock {
            row.wall_clock_s = 0.0;
        }
        self.writer.serialize(row)?;
        self.writer.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}
