//! Helpers shared by the CLI integration and acceptance tests.

#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_vistream")
}

/// Runs the binary and panics unless it exits successfully.
pub fn run_ok(args: &[&str]) -> Output {
    let output = Command::new(bin())
        .args(args)
        .env("VISTREAM_LOG", "warn")
        .output()
        .expect("spawn vistream");
    assert!(
        output.status.success(),
        "vistream {:?} failed:\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr),
    );
    output
}

/// Runs the binary expecting a nonzero exit.
pub fn run_err(args: &[&str]) -> Output {
    let output = Command::new(bin())
        .args(args)
        .env("VISTREAM_LOG", "error")
        .output()
        .expect("spawn vistream");
    assert!(
        !output.status.success(),
        "vistream {args:?} unexpectedly succeeded"
    );
    output
}

/// A broker subprocess bound to an ephemeral port.
pub struct BrokerProc {
    child: Child,
    pub addr: String,
}

impl BrokerProc {
    pub fn start() -> BrokerProc {
        let mut child = Command::new(bin())
            .args(["broker", "--bind", "127.0.0.1:0"])
            .env("VISTREAM_LOG", "warn")
            .stdout(Stdio::piped())
            .spawn()
            .expect("spawn broker");
        let stdout = child.stdout.take().expect("piped stdout");
        let mut lines = BufReader::new(stdout).lines();
        let addr = loop {
            let line = lines
                .next()
                .expect("broker exited before announcing its address")
                .expect("read broker stdout");
            if let Some(addr) = line.strip_prefix("broker listening on ") {
                break addr.trim().to_string();
            }
        };
        BrokerProc { child, addr }
    }
}

impl Drop for BrokerProc {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Writes a deterministic three-class Vietnamese fixture dataset with
/// `per_class` records per label.
pub fn write_fixture_csv(path: &Path, per_class: usize) -> PathBuf {
    let other = [
        "haha cái này vui nha",
        "anh áo trắng nói hay quá",
        "video này dễ thương ghê",
        "hôm nay trời đẹp thật",
        "xem mà cười xỉu luôn",
        "nhạc hay quá trời ơi",
        "quán này ngon lắm nè",
        "đi đâu đấy bạn ơi",
    ];
    let discrimination = [
        "bắc kỳ toàn lũ xấu xa",
        "nam kỳ ăn nói vô học",
        "dân thanh hóa sống bạc lắm",
        "parky cút về quê đi",
        "bọn miền trung keo kiệt bẩn tính",
        "giọng bắc nghe ghét thật sự",
        "dân nghệ an toàn lừa lọc",
        "cái lũ bắc kỳ tham lam",
    ];
    let supportive = [
        "nam bắc một nhà thôi mọi người",
        "bắc trung nam đều là anh em",
        "đồng bào mình thương nhau đi",
        "việt nam đoàn kết muôn năm",
        "đừng phân biệt vùng miền nữa",
        "ở đâu cũng là người việt nam",
        "tổ quốc mình đẹp lắm ai cũng như nhau",
        "yêu thương nhau đi đừng kỳ thị",
    ];
    let mut w = csv::Writer::from_path(path).expect("create fixture csv");
    w.write_record(["id", "text", "label", "source"]).unwrap();
    let mut i = 0usize;
    for (texts, label) in [
        (other.as_slice(), "0.0"),
        (discrimination.as_slice(), "1.0"),
        (supportive.as_slice(), "2.0"),
    ] {
        for k in 0..per_class {
            let base = texts[k % texts.len()];
            let text = if k < texts.len() {
                base.to_string()
            } else {
                format!("{base} {k}")
            };
            w.write_record([&format!("c{i}"), &text, label, "fixture"])
                .unwrap();
            i += 1;
        }
    }
    w.flush().unwrap();
    path.to_path_buf()
}

pub fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    let mut reader = csv::Reader::from_path(path)
        .unwrap_or_else(|e| panic!("open {}: {e}", path.display()));
    reader.records().map(|r| r.expect("csv record")).collect()
}

pub fn count_csv_rows(path: &Path) -> usize {
    if !path.exists() {
        return 0;
    }
    match csv::Reader::from_path(path) {
        Ok(mut reader) => reader.records().filter_map(|r| r.ok()).count(),
        Err(_) => 0,
    }
}

/// Minimal well-formedness check: every opened tag is closed in order.
/// Understands the doctype line, self-closing tags and quoted attributes.
pub fn assert_well_formed_html(html: &str) {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = html;
    while let Some(start) = rest.find('<') {
        rest = &rest[start + 1..];
        let end = rest.find('>').expect("unterminated tag");
        let tag = &rest[..end];
        rest = &rest[end + 1..];
        if tag.starts_with('!') {
            continue; // doctype
        }
        if let Some(name) = tag.strip_prefix('/') {
            let open = stack.pop().unwrap_or_else(|| {
                panic!("closing </{name}> with nothing open")
            });
            assert_eq!(open, name.trim(), "mismatched closing tag");
            continue;
        }
        if tag.ends_with('/') {
            continue; // self-closing
        }
        let name: String = tag
            .split_whitespace()
            .next()
            .expect("tag name")
            .to_string();
        stack.push(name);
    }
    assert!(stack.is_empty(), "unclosed tags: {stack:?}");
}
