//! FRED client against a local HTTP server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::mpsc;
use std::time::Duration;

use trendscope::ingest::fred::{FredClient, HttpTransport, RetryPolicy};
use trendscope::{Error, Frequency, Window};

/// Serves `replies` in order, one per connection, and reports each request line.
fn serve(replies: Vec<(u16, &'static str)>) -> (String, mpsc::Receiver<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}/fred", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        for (status, body) in replies {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            let mut line = String::new();
            loop {
                line.clear();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
            }
            tx.send(request_line.trim().to_string()).unwrap();
            let reason = if status == 200 { "OK" } else { "Error" };
            write!(
                stream,
                "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
            stream.flush().unwrap();
            let _ = reader.read(&mut [0u8; 1]);
        }
    });
    (base, rx)
}

const TWO: &str = r#"{"realtime_start":"2024-01-01","count":2,"observations":[{"date":"1980-01-01","value":"10.8"},{"date":"1980-04-01","value":"10.3"}]}"#;

fn client(base: &str) -> FredClient {
    FredClient::new(base, "test-key", HttpTransport::new(Duration::from_secs(5)))
        .unwrap()
        .with_retry(RetryPolicy { max_attempts: 5, base_delay: Duration::from_millis(10) })
}

#[test]
fn two_observations_round_trip() {
    let (base, rx) = serve(vec![(200, TWO)]);
    let w = Window::years(1980, 1980).unwrap();
    let p = client(&base).fetch("GS10", Some(&w), Some(Frequency::Quarterly)).unwrap();
    assert_eq!(p.observations.len(), 2);
    let req = rx.recv().unwrap();
    assert!(req.starts_with("GET /fred/series/observations?series_id=GS10&api_key=test-key&file_type=json"), "{req}");
    assert!(req.contains("observation_start=1980-01-01") && req.contains("observation_end=1980-12-31"), "{req}");
}

#[test]
fn rate_limit_then_success() {
    let (base, rx) = serve(vec![(429, "{}"), (200, TWO)]);
    let p = client(&base).fetch("GS10", None, None).unwrap();
    assert_eq!(p.observations.len(), 2);
    assert_eq!(rx.try_iter().count(), 2);
}

#[test]
fn unknown_series_names_the_id() {
    let (base, rx) = serve(vec![(400, r#"{"error_code":400,"error_message":"Bad Request.  The series does not exist."}"#)]);
    match client(&base).fetch("NOT_A_SERIES", None, None) {
        Err(Error::UnknownSeries(id)) => assert_eq!(id, "NOT_A_SERIES"),
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(rx.try_iter().count(), 1);
}

#[test]
fn forbidden_is_auth_error_without_retry() {
    let (base, rx) = serve(vec![(403, r#"{"error_code":403,"error_message":"Forbidden"}"#)]);
    assert!(matches!(client(&base).fetch("GS10", None, None), Err(Error::Auth { status: 403, .. })));
    assert_eq!(rx.try_iter().count(), 1);
}

#[test]
fn server_errors_exhaust_retries() {
    let (base, rx) = serve(vec![(500, ""), (502, ""), (503, ""), (500, ""), (500, "")]);
    assert!(matches!(client(&base).fetch("GS10", None, None), Err(Error::NetworkExhausted { attempts: 5, .. })));
    assert_eq!(rx.try_iter().count(), 5);
}
