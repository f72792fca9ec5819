//! Fetches FRED observations.
//!
//! ```text
//! FRED_API_KEY=... cargo run --example fred_fetch -- GS10
//! cargo run --example fred_fetch
//! ```
//!
//! Without a key the client talks to a tiny local server that answers the
//! first request with 429 and the second with two observations, showing the
//! retry path.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::time::Duration;

use trendscope::ingest::fred::{payload_to_series, FredClient, HttpTransport, RetryPolicy, API_KEY_ENV};
use trendscope::ingest::{SeriesSpec, Source};
use trendscope::{Frequency, Unit, Window};

fn local_server() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        let replies = [
            ("429 Too Many Requests", "{}".to_string()),
            (
                "200 OK",
                r#"{"observations":[{"date":"2019-01-01","value":"2.71"},{"date":"2019-02-01","value":"."},{"date":"2019-03-01","value":"2.57"}]}"#.to_string(),
            ),
        ];
        for (status, body) in replies {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut line = String::new();
            while reader.read_line(&mut line).unwrap() > 2 {
                line.clear();
            }
            write!(
                stream,
                "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
    });
    format!("http://{addr}/fred")
}

fn main() -> trendscope::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let id = std::env::args().nth(1).unwrap_or_else(|| "GS10".into());
    let client = match std::env::var(API_KEY_ENV) {
        Ok(_) => FredClient::from_env()?,
        Err(_) => {
            println!("{API_KEY_ENV} not set, using a local mock server");
            FredClient::new(&local_server(), "demo", HttpTransport::default())?
                .with_retry(RetryPolicy { max_attempts: 5, base_delay: Duration::from_millis(50) })
        }
    };
    let window = Window::years(2019, 2019)?;
    let payload = client.fetch(&id, Some(&window), Some(Frequency::Monthly))?;
    let spec = SeriesSpec::new(&id, Source::Fred, &id, Unit::PercentPoints, Frequency::Monthly);
    let load = payload_to_series(&payload.body, &spec)?;
    println!("{id}: {} observations in payload, {} kept, {} missing dropped", payload.observations.len(), load.series.len(), load.dropped);
    for p in load.series.points() {
        println!("  {} {}", p.date, p.value);
    }
    Ok(())
}
