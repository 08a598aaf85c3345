use std::path::PathBuf;
use std::process::ExitCode;

use famsec_service::{router, AppState, ServiceConfig};

fn config() -> Result<ServiceConfig, String> {
    let path = std::env::args_os()
        .nth(1)
        .or_else(|| std::env::var_os("FAMSEC_CONFIG"))
        .map(PathBuf::from);
    let mut config = ServiceConfig::load(path.as_deref()).map_err(|e| e.to_string())?;
    config.apply_env(|k| std::env::var(k).ok()).map_err(|e| e.to_string())?;
    Ok(config)
}

#[tokio::main]
async fn main() -> ExitCode {
    let config = match config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("famsec-service: {e}");
            return ExitCode::from(2);
        }
    };
    let bind = config.bind.clone();
    let state = match AppState::new(config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("famsec-service: {e}");
            return ExitCode::from(2);
        }
    };
    let listener = match tokio::net::TcpListener::bind(&bind).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("famsec-service: cannot bind {bind}: {e}");
            return ExitCode::FAILURE;
        }
    };
    eprintln!("famsec-service listening on {bind}");
    if let Err(e) = axum::serve(listener, router(state)).await {
        eprintln!("famsec-service: {e}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
