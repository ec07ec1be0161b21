fn main() {
    eprintln!("gaplab: command-line interface not yet wired up");
    std::process::exit(2);
}
