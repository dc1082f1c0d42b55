//! Command-line surface (placeholder while the library grows).
pub fn run() -> i32 {
    eprintln!("lagasy: not yet wired");
    2
}
