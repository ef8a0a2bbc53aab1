pub mod battery;
pub mod burden;
pub mod error;
pub mod info;
pub mod linear;
pub mod panel;
pub mod report;
mod serde_float;
pub mod special;
pub mod temporal;

pub use error::{Error, Result};

// the guide's code blocks run as doctests
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/panels.md")]
    mod panels {}
    #[doc = include_str!("../../../book/src/correlation.md")]
    mod correlation {}
    #[doc = include_str!("../../../book/src/information.md")]
    mod information {}
    #[doc = include_str!("../../../book/src/granger.md")]
    mod granger {}
    #[doc = include_str!("../../../book/src/burden.md")]
    mod burden {}
    #[doc = include_str!("../../../book/src/battery.md")]
    mod battery {}
    #[doc = include_str!("../../../book/src/reports.md")]
    mod reports {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
