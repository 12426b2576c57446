fn main() {
    let (out, code) = kolchin_cli::run_args(std::env::args_os());
    if code == 2 {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    std::process::exit(code);
}
