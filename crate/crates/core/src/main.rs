fn main() {
    std::process::exit(gaze_intent::cli::run(std::env::args_os()));
}
