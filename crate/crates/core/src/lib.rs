pub mod field;
pub mod msc;
pub mod canonical;
pub mod der;
pub mod errata;
pub mod linalg;
pub mod aut;
pub mod classify;
pub mod text;
pub mod verify;
pub mod api;
