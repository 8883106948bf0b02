fn main() {
    let code = subhyp::cli::main_entry(std::env::args_os());
    std::process::exit(code);
}
