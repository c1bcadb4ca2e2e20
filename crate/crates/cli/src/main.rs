fn main() {
    std::process::exit(qbd_sim::main_with_args(std::env::args_os()));
}
