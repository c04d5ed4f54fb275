fn main() {
    let r = kmod_core::cli::run(std::env::args_os());
    if r.code == 0 {
        println!("{}", r.text.trim_end());
    } else {
        eprintln!("{}", r.text.trim_end());
    }
    std::process::exit(r.code);
}
