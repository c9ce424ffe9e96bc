//! Driving a sweep from code instead of the command line.

use qcong::cli::{execute, render, EllPolicy, FamilyTag, InclusiveRange, OutputFormat, RunConfig};

fn main() {
    let config = RunConfig {
        families: vec![FamilyTag::T1, FamilyTag::Conj413, FamilyTag::B2, FamilyTag::MP],
        n_range: Some(InclusiveRange { lo: 1, hi: 19 }),
        p_range: Some(InclusiveRange { lo: 3, hi: 31 }),
        ell_policy: EllPolicy::All,
        sample_count: None,
        output: OutputFormat::Table,
        jobs: 4,
    };
    let verdicts = execute(&config).expect("valid configuration");
    print!("{}", render(&verdicts, config.output));
}
