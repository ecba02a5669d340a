//! The scalar case through the command-line layer: a β sweep over
//! A = {0, 1, 2, 5} as CSV, ready for an external plotter. ⟨E⟩ falls
//! monotonically from near 5 to near 0.

use moment_gibbs::cli::{self, Payload};

pub fn run() -> moment_gibbs::Result<()> {
    let input = include_str!("../data/scalar_ladder.json");
    let args = ["moment-gibbs", "sweep", "-", "--axis", "0", "--from", "-10", "--to", "10", "--steps", "11"];
    let out = cli::run(args, &mut input.as_bytes());
    let Payload::Text(csv) = out.payload else {
        return Err(moment_gibbs::Error::InvalidInput(out.diagnostics.join("; ")));
    };
    print!("{csv}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> moment_gibbs::Result<()> {
    run()
}
