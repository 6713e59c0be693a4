#![allow(dead_code)]

pub mod demo;
pub mod gen;
pub mod oracle;
