fn main() {
    std::process::exit(hessflow::cli::main_with_args(std::env::args_os()));
}
