fn main() {
    // Placeholder until the pipeline lands; replaced by the clap driver.
    eprintln!("rigid-zeta: pipeline not yet wired");
    std::process::exit(1);
}
