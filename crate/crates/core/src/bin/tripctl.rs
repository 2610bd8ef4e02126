//! Command-line client: runs the API server or performs the same
//! operations directly against the configured journal.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use clap::{Parser, Subcommand};
use serde::Serialize;
use tripminder::eval::{
    load_corpus, pattern_method, run_comparison, Averaging, Method, PopularMentionsMethod,
    TfIdfMethod,
};
use tripminder::gateway::{
    http, ApiError, CreateTripRequest, FramesRequest, GatewayConfig, SelectionRequest, Service,
    API_TOKEN_ENV,
};

#[derive(Parser)]
#[command(
    name = "tripctl",
    version,
    about = "Trip packing recommendations and reminders"
)]
struct Cli {
    /// TOML config file; built-in defaults when omitted.
    #[arg(long, global = true, env = "TRIPMINDER_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the JSON API.
    Serve {
        /// Overrides `service.listen`.
        #[arg(long)]
        listen: Option<String>,
    },
    /// Create and manage trips.
    #[command(subcommand)]
    Trip(TripCommand),
    /// Notification delivery.
    #[command(subcommand)]
    Notify(NotifyCommand),
    /// Precision/recall of the extractors on an annotated corpus.
    Eval {
        /// Line-delimited `{"text", "ground_truth"}` records.
        #[arg(long)]
        corpus: PathBuf,
        /// Average over pooled counts instead of per document.
        #[arg(long)]
        micro: bool,
        /// n-grams per document for the tf-idf baseline.
        #[arg(long, default_value_t = 3)]
        tfidf_k: usize,
        /// Popular-mention tokens for the constant baseline.
        #[arg(long, value_delimiter = ',')]
        mentions: Vec<String>,
        /// Emit per-document JSON rows instead of the table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum TripCommand {
    /// Build recommendations from an email and schedule its reminders.
    Create {
        #[arg(long)]
        email: PathBuf,
        #[arg(long)]
        subject: Option<String>,
        #[arg(long)]
        received_at: Option<DateTime<Utc>>,
        /// Allow the destination and dates to be sent to providers.
        #[arg(long)]
        consent: bool,
    },
    /// Print one trip.
    Show { id: String },
    /// Print every trip.
    List,
    /// Record the pruned list of items to be reminded about.
    Select { id: String, items: Vec<String> },
    /// Run a frame manifest through the packing tracker.
    Frames {
        id: String,
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Show the missed items; `--finalize` sends the alert now.
    Alert {
        id: String,
        #[arg(long)]
        finalize: bool,
    },
}

#[derive(Subcommand)]
enum NotifyCommand {
    /// Fire every notification due at `--now` (default: current time).
    Poll {
        #[arg(long)]
        now: Option<DateTime<Utc>>,
    },
}

fn print<T: Serialize>(value: &T) -> Result<(), ApiError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| ApiError::new("INTERNAL", e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn load_config(path: Option<&PathBuf>) -> Result<GatewayConfig, ApiError> {
    match path {
        Some(p) => GatewayConfig::load(p).map_err(ApiError::bad_request),
        None => Ok(GatewayConfig::default()),
    }
}

fn run(cli: Cli) -> Result<(), ApiError> {
    let config = load_config(cli.config.as_ref())?;
    let service = || Service::from_config(&config);
    match cli.command {
        Command::Serve { listen } => {
            let listen = listen.unwrap_or_else(|| config.service.listen.clone());
            let service = Arc::new(service()?);
            let token = std::env::var(API_TOKEN_ENV).ok().filter(|t| !t.is_empty());
            let runtime = tokio::runtime::Runtime::new()
                .map_err(|e| ApiError::new("INTERNAL", e.to_string()))?;
            eprintln!("listening on {listen}");
            runtime
                .block_on(http::serve(service, &listen, token))
                .map_err(|e| ApiError::new("INTERNAL", e.to_string()))
        }
        Command::Trip(TripCommand::Create {
            email,
            subject,
            received_at,
            consent,
        }) => {
            let email_text = std::fs::read_to_string(&email)
                .map_err(|e| ApiError::bad_request(format!("{}: {e}", email.display())))?;
            print(&service()?.create_trip(CreateTripRequest {
                email_text,
                subject,
                received_at,
                consent,
            })?)
        }
        Command::Trip(TripCommand::Show { id }) => print(&service()?.trip(&id)?),
        Command::Trip(TripCommand::List) => print(&service()?.trips()),
        Command::Trip(TripCommand::Select { id, items }) => {
            print(&service()?.select(&id, SelectionRequest { items })?)
        }
        Command::Trip(TripCommand::Frames { id, manifest }) => print(&service()?.ingest_frames(
            &id,
            FramesRequest::Manifest {
                manifest: manifest.to_string_lossy().into_owned(),
            },
        )?),
        Command::Trip(TripCommand::Alert { id, finalize }) => {
            let service = service()?;
            if finalize {
                print(&service.finalize_alert(&id)?)
            } else {
                print(&service.alert_preview(&id)?)
            }
        }
        Command::Notify(NotifyCommand::Poll { now }) => print(&service()?.poll_notifications(now)?),
        Command::Eval {
            corpus,
            micro,
            tfidf_k,
            mentions,
            json,
        } => {
            let contents = std::fs::read_to_string(&corpus)
                .map_err(|e| ApiError::bad_request(format!("{}: {e}", corpus.display())))?;
            let corpus =
                load_corpus(&contents).map_err(|e| ApiError::bad_request(e.to_string()))?;
            let ours = pattern_method();
            let tfidf = TfIdfMethod { k: tfidf_k };
            let popular = PopularMentionsMethod { mentions };
            let mut methods: Vec<&dyn Method> = vec![&tfidf, &ours];
            if !popular.mentions.is_empty() {
                methods.push(&popular);
            }
            let averaging = if micro {
                Averaging::Micro
            } else {
                Averaging::Macro
            };
            let report = run_comparison(&corpus, &methods, averaging)
                .map_err(|e| ApiError::bad_request(e.to_string()))?;
            if json {
                for row in report.json_rows() {
                    println!("{row}");
                }
            } else {
                print!("{}", report.render_text());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::to_string(&e).unwrap_or_else(|_| e.to_string())
            );
            ExitCode::FAILURE
        }
    }
}
