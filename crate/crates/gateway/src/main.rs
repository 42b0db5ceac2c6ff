use std::net::SocketAddr;
use std::process::ExitCode;

use clap::Parser;
use viz::cli::{self, Cli, CliCommand, EXIT_RENDER_FAILURE, EXIT_UNREADABLE};
use viz::hub::Hub;

fn main() -> ExitCode {
    match Cli::parse().command {
        CliCommand::Run(args) => {
            let report = cli::run(&args);
            for e in &report.errors {
                eprintln!("{}:{e}", args.script.display());
            }
            if let Some(f) = &report.failure {
                eprintln!("error: {f}");
            }
            ExitCode::from(report.exit_code)
        }
        CliCommand::Serve(args) => {
            let addr: SocketAddr = match format!("{}:{}", args.host, args.port).parse() {
                Ok(a) => a,
                Err(e) => {
                    eprintln!("error: bad address: {e}");
                    return ExitCode::from(EXIT_UNREADABLE);
                }
            };
            let runtime = tokio::runtime::Runtime::new().expect("tokio runtime starts");
            let hub = Hub::new(args.data);
            let served = runtime.block_on(viz::server::serve(addr, hub, |a| eprintln!("listening on http://{a}")));
            match served {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_RENDER_FAILURE)
                }
            }
        }
        CliCommand::Import(args) => match cli::import(&args) {
            Ok(path) => {
                println!("{}", path.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_UNREADABLE)
            }
        },
    }
}
