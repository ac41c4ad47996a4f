use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use clap::Parser;
use orderopt_session::{serve, SessionStore};

#[derive(Parser)]
#[command(name = "orderopt-serve", version, about = "Serve human-as-oracle optimization sessions over HTTP")]
struct Args {
    /// Address to listen on; port 0 picks a free port.
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Directory holding one JSONL journal per session.
    #[arg(long, default_value = "sessions")]
    journal_dir: PathBuf,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    let store = SessionStore::open(&args.journal_dir)
        .with_context(|| format!("opening journals in {}", args.journal_dir.display()))?;
    let resumed = store.ids().len();
    let listener = tokio::net::TcpListener::bind(args.addr)
        .await
        .with_context(|| format!("binding {}", args.addr))?;
    // Scripts (and tests) read the bound address from this line.
    println!("listening on http://{}", listener.local_addr()?);
    eprintln!("resumed {resumed} sessions from {}", args.journal_dir.display());
    serve(listener, Arc::new(store), async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await?;
    Ok(())
}
