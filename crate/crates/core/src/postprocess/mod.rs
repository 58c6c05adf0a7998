//! From raw detections to a meter reading.
//!
//! [`filter_detections`] drops junk (confidence at or below a floor and
//! non-digit classes), collapses duplicate detections of the same register
//! position, and orders the survivors left to right. [`assemble_reading`]
//! then concatenates the digits and places the decimal point according to
//! the register's [`MeterConfig`].

mod config;
mod filter;
mod reading;

pub use config::{ConfigError, ConfigTable, MeterConfig};
pub use filter::{filter_detections, priority_order, FilterParams};
pub use reading::{assemble_reading, is_correct, is_reading_text, CompareMode, Reading};
