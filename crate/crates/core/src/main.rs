use radoppler::cli::{run_from, LOG_ENV};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn"))
        .format_timestamp(None)
        .init();
    std::process::exit(run_from(std::env::args_os()));
}
