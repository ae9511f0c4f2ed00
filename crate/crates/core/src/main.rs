fn main() {
    std::process::exit(cls_notch::cli::run(std::env::args_os()));
}
