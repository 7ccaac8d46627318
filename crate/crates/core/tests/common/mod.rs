#![allow(dead_code)]

pub mod dot;
pub mod oracle;
