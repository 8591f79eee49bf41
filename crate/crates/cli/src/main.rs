fn main() {
    std::process::exit(cstar_pm_cli::run(std::env::args_os()));
}
