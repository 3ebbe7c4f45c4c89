//! Shared test fixtures: the bundled corpus generator, random reference
//! texts, and a deterministic fuzz model.
//!
//! Each integration test target compiles its own copy and uses a subset.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fpod::model::{CausalModel, ModelError, PredictionSeq};
use fpod::token::{Token, TokenSeq};

pub const FIXTURE_SEED: u64 = 0x5eed_f00d;

/// Path to the bundled evaluation corpus.
pub fn bundled_corpus_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus.jsonl")
}

pub fn bundled_example_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/example.jsonl")
}

const SYLLABLES: [&str; 8] = ["ba", "de", "fi", "go", "hu", "ka", "le", "mo"];

/// Globally unique pronounceable word for counter value `n`.
fn unique_word(n: usize) -> String {
    let mut word = String::with_capacity(8);
    for shift in [9usize, 6, 3, 0] {
        word.push_str(SYLLABLES[(n >> shift) & 7]);
    }
    word
}

struct WordMint {
    next: usize,
}

impl WordMint {
    fn new() -> Self {
        WordMint { next: 0 }
    }

    fn take(&mut self) -> String {
        let word = unique_word(self.next);
        self.next += 1;
        assert!(self.next < 8 * 8 * 8 * 8, "word space exhausted");
        word
    }
}

/// The bundled corpus, deterministically generated.
///
/// Layout, in order:
/// * one long opening sentence (30 words, one comma) so sequential decoding
///   from a corpus-wide oracle runs for 60+ steps;
/// * the same short comma-free sentence three times, giving the n-gram
///   backends an unambiguous highest-count generation path;
/// * twenty sentences whose stripped form is exactly 50 tokens (one word
///   carries a fused digit run, making the token count even);
/// * two hundred regular sentences of 8-16 words.
///
/// Every other word is unique across the corpus, commas are always
/// mid-sentence, and each sentence ends in '.' or '?', so a bigram oracle
/// built from the corpus restores every sentence exactly.
pub fn fixture_corpus() -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(FIXTURE_SEED);
    let mut mint = WordMint::new();
    let mut sentences: Vec<String> = Vec::new();

    let sentence = |words: &[String], commas: &[usize], terminal: char| -> String {
        let mut text = String::new();
        for (i, word) in words.iter().enumerate() {
            if i > 0 {
                text.push(' ');
            }
            text.push_str(word);
            if commas.contains(&i) {
                text.push(',');
            }
        }
        text.push(terminal);
        text
    };

    let long: Vec<String> = (0..30).map(|_| mint.take()).collect();
    sentences.push(sentence(&long, &[11], '.'));

    for _ in 0..3 {
        sentences.push("zulu yankee xray.".to_string());
    }

    for i in 0..20 {
        // 25 whitespace-separated words; the fused digit splits one of them
        // in two tokens, so the stripped form is 26 content tokens and 24
        // separators: exactly 50.
        let mut words: Vec<String> = (0..25).map(|_| mint.take()).collect();
        let fused_at = 3 + (i % 10);
        words[fused_at] = format!("{}{}", words[fused_at], 100 + i);
        let comma_at = 7 + (i % 11);
        let terminal = if i % 4 == 0 { '?' } else { '.' };
        sentences.push(sentence(&words, &[comma_at], terminal));
    }

    for i in 0..200 {
        let n_words = rng.gen_range(8..=16);
        let words: Vec<String> = (0..n_words).map(|_| mint.take()).collect();
        let mut commas: Vec<usize> = Vec::new();
        if rng.gen_bool(0.55) {
            commas.push(rng.gen_range(1..n_words - 1));
        }
        if n_words > 10 && rng.gen_bool(0.2) {
            let second = rng.gen_range(1..n_words - 1);
            if !commas.contains(&second) && !commas.contains(&(second - 1)) {
                commas.push(second);
            }
        }
        let terminal = if i % 10 < 3 { '?' } else { '.' };
        sentences.push(sentence(&words, &commas, terminal));
    }

    sentences
}

pub fn to_jsonl(texts: &[String]) -> String {
    let mut out = String::new();
    for text in texts {
        out.push_str(&serde_json::json!({ "reference": text }).to_string());
        out.push('\n');
    }
    out
}

/// One long reference text with sprinkled marks, words unique per `mint`
/// namespace (caller passes a fresh offset to keep texts disjoint).
pub fn random_reference(rng: &mut ChaCha8Rng, n_words: usize, offset: usize) -> String {
    let mut text = String::new();
    for i in 0..n_words {
        if i > 0 {
            text.push(' ');
        }
        text.push_str(&unique_word(offset + i));
        if i + 1 < n_words && rng.gen_bool(0.12) {
            text.push(if rng.gen_bool(0.7) { ',' } else { '.' });
        }
    }
    text.push(if rng.gen_bool(0.3) { '?' } else { '.' });
    text
}

// ---------------------------------------------------------------------------
// Fuzz model
// ---------------------------------------------------------------------------

/// Deterministic pseudo-random predictor: the prediction at each position is
/// a pure hash of the seed and the prefix, drawn from a pool that includes
/// marks, digits, separators, and end-of-sequence.
pub struct FuzzModel {
    seed: u64,
    pool: Vec<Token>,
}

impl FuzzModel {
    pub fn new(seed: u64) -> Self {
        let pool = vec![
            Token::word("veq"),
            Token::word("ruz"),
            Token::punct(','),
            Token::punct('.'),
            Token::punct('?'),
            Token::digit("7"),
            Token::digit("42"),
            Token::space(),
            Token::eos(),
            Token::punct(','),
            Token::digit("3"),
        ];
        FuzzModel { seed, pool }
    }

    fn fnv(&self, prefix: &[Token]) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ self.seed;
        let mut eat = |byte: u8| {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x100_0000_01b3);
        };
        for token in prefix {
            eat(token.class() as u8);
            for b in token.text().bytes() {
                eat(b);
            }
            eat(0xff);
        }
        h
    }
}

impl CausalModel for FuzzModel {
    fn forward_full(&self, tokens: &[Token]) -> Result<PredictionSeq, ModelError> {
        Ok((1..=tokens.len())
            .map(|j| self.pool[(self.fnv(&tokens[..j]) % self.pool.len() as u64) as usize].clone())
            .collect())
    }
}

/// Spawn a newline-delimited-JSON model server on an ephemeral port, serving
/// until the test process exits. Returns the address.
pub fn spawn_ndjson_server(
    respond: impl Fn(fpod::model::WireRequest) -> String + Send + Sync + 'static,
) -> String {
    use std::io::{BufRead, BufReader, BufWriter, Write};
    use std::net::TcpListener;
    use std::sync::Arc;
    use std::thread;

    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    let respond = Arc::new(respond);
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(stream) = stream else { break };
            let respond = respond.clone();
            thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut writer = BufWriter::new(stream);
                let mut line = String::new();
                while let Ok(n) = reader.read_line(&mut line) {
                    if n == 0 {
                        break;
                    }
                    let request: fpod::model::WireRequest =
                        match serde_json::from_str(line.trim_end()) {
                            Ok(r) => r,
                            Err(_) => break,
                        };
                    let reply = respond(request);
                    if writer.write_all(reply.as_bytes()).is_err()
                        || writer.write_all(b"\n").is_err()
                        || writer.flush().is_err()
                    {
                        break;
                    }
                    line.clear();
                }
            });
        }
    });
    addr
}

/// A conforming responder: comma after "hello", end-of-sequence otherwise.
pub fn conforming_responder(request: fpod::model::WireRequest) -> String {
    let predict = |prefix: &[String]| -> String {
        match prefix.last().map(String::as_str) {
            Some("hello") => ",".to_string(),
            _ => "</s>".to_string(),
        }
    };
    let predictions: Vec<String> = match request.op.as_str() {
        "full" => (1..=request.tokens.len()).map(|j| predict(&request.tokens[..j])).collect(),
        _ => vec![predict(&request.tokens)],
    };
    serde_json::to_string(&fpod::model::WireResponse { id: request.id, predictions }).unwrap()
}

/// Random well-formed input: words and digit runs separated by single spaces.
pub fn random_input(rng: &mut ChaCha8Rng, max_units: usize) -> TokenSeq {
    let units = rng.gen_range(1..=max_units.max(1));
    let mut tokens: Vec<Token> = Vec::new();
    for i in 0..units {
        if i > 0 {
            tokens.push(Token::space());
        }
        if rng.gen_bool(0.25) {
            tokens.push(Token::digit(format!("{}", rng.gen_range(0..1000))));
        } else {
            tokens.push(Token::word(unique_word(rng.gen_range(0..4096))));
        }
    }
    TokenSeq::new(tokens)
}
