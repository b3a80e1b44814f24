fn main() {
    // Die quietly on a closed pipe (e.g. `ecomet paper-verify | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(ecomet::cli::run(std::env::args_os()));
}
