//! Live NCBI E-utilities client: `esearch` for PMID lists, `efetch` for
//! article payloads, with token-bucket rate limiting and bounded backoff.
//!
//! Public E-utilities policy allows 3 requests/second anonymously and 10
//! with a registered key; the key is read from `NCBI_API_KEY`.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::acquisition::{DocumentSource, RawDocument};
use crate::error::{Error, Result};

/// Simple token bucket; `take` blocks the calling thread until a token is
/// available.
pub struct TokenBucket {
    capacity: f64,
    per_second: f64,
    state: Mutex<(f64, Instant)>,
}

impl TokenBucket {
    pub fn new(per_second: f64) -> Self {
        TokenBucket {
            capacity: per_second,
            per_second,
            state: Mutex::new((per_second, Instant::now())),
        }
    }

    pub fn take(&self) {
        loop {
            let wait = {
                let mut st = self.state.lock().unwrap();
                let now = Instant::now();
                let elapsed = now.duration_since(st.1).as_secs_f64();
                st.0 = (st.0 + elapsed * self.per_second).min(self.capacity);
                st.1 = now;
                if st.0 >= 1.0 {
                    st.0 -= 1.0;
                    None
                } else {
                    Some(Duration::from_secs_f64((1.0 - st.0) / self.per_second))
                }
            };
            match wait {
                None => return,
                Some(d) => std::thread::sleep(d),
            }
        }
    }
}

pub struct EutilsClient {
    base_url: String,
    api_key: Option<String>,
    bucket: TokenBucket,
}

const DEFAULT_BASE: &str = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils";

impl EutilsClient {
    /// Client against the public endpoint. Rate defaults follow the key:
    /// 10 req/s with `NCBI_API_KEY` set, 3 without.
    pub fn new() -> Self {
        Self::with_base_url(DEFAULT_BASE)
    }

    pub fn with_base_url(base_url: impl Into<String>) -> Self {
        let api_key = std::env::var("NCBI_API_KEY").ok();
        let rate = if api_key.is_some() { 10.0 } else { 3.0 };
        EutilsClient {
            base_url: base_url.into(),
            api_key,
            bucket: TokenBucket::new(rate),
        }
    }

    pub fn with_rate(mut self, per_second: f64) -> Self {
        self.bucket = TokenBucket::new(per_second);
        self
    }

    fn get(&self, path: &str, params: &[(&str, &str)]) -> Result<String> {
        let url = format!("{}/{path}", self.base_url.trim_end_matches('/'));
        let mut backoff = Duration::from_secs(1);
        for attempt in 0..4 {
            self.bucket.take();
            let mut req = ureq::get(&url);
            for (k, v) in params {
                req = req.query(*k, *v);
            }
            if let Some(key) = &self.api_key {
                req = req.query("api_key", key);
            }
            match req.call() {
                Ok(mut resp) => {
                    return resp
                        .body_mut()
                        .read_to_string()
                        .map_err(|e| Error::transport(format!("eutils read: {e}"), true));
                }
                Err(ureq::Error::StatusCode(code)) if code == 429 || code >= 500 => {
                    if attempt == 3 {
                        return Err(Error::transport(
                            format!("eutils {path} failed with status {code} after retries"),
                            true,
                        ));
                    }
                    std::thread::sleep(backoff);
                    backoff *= 2;
                }
                Err(e) => return Err(Error::transport(format!("eutils {path}: {e}"), true)),
            }
        }
        unreachable!("retry loop returns")
    }
}

impl EutilsClient {
    /// Total PubMed hits for a query without fetching ids.
    pub fn count(&self, query: &str) -> Result<u64> {
        let body = self.get(
            "esearch.fcgi",
            &[("db", "pubmed"), ("term", query), ("retmode", "json"), ("retmax", "0")],
        )?;
        let value: serde_json::Value = serde_json::from_str(&body)
            .map_err(|e| Error::transport(format!("esearch JSON: {e}"), false))?;
        value["esearchresult"]["count"]
            .as_str()
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| Error::transport("esearch response lacks a count", false))
    }
}

impl Default for EutilsClient {
    fn default() -> Self {
        Self::new()
    }
}

/// Minimal extraction of `<Tag>text</Tag>` spans from well-formed PubMed
/// XML. Attributes on the opening tag are tolerated; nested markup inside
/// the span is stripped.
fn xml_spans(xml: &str, tag: &str) -> Vec<String> {
    let open_a = format!("<{tag}>");
    let open_b = format!("<{tag} ");
    let close = format!("</{tag}>");
    let mut out = Vec::new();
    let mut rest = xml;
    loop {
        let start = match (rest.find(&open_a), rest.find(&open_b)) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => break,
        };
        let after_open = &rest[start..];
        let content_start = match after_open.find('>') {
            Some(i) => i + 1,
            None => break,
        };
        let body = &after_open[content_start..];
        let end = match body.find(&close) {
            Some(i) => i,
            None => break,
        };
        out.push(strip_tags(&body[..end]));
        rest = &body[end + close.len()..];
    }
    let _ = rest;
    out
}

fn strip_tags(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut in_tag = false;
    for c in s.chars() {
        match c {
            '<' => in_tag = true,
            '>' => in_tag = false,
            _ if !in_tag => out.push(c),
            _ => {}
        }
    }
    out.trim().to_string()
}

fn parse_pubmed_article(article_xml: &str) -> Option<RawDocument> {
    let pmid = xml_spans(article_xml, "PMID").into_iter().next()?;
    let title = xml_spans(article_xml, "ArticleTitle")
        .into_iter()
        .next()
        .unwrap_or_default();
    let text = xml_spans(article_xml, "AbstractText").join(" ");
    let publication_year = xml_spans(article_xml, "Year")
        .into_iter()
        .next()
        .and_then(|y| y.parse().ok());
    let journal = xml_spans(article_xml, "Title").into_iter().next();
    let publication_types = xml_spans(article_xml, "PublicationType");
    let pmc_id = xml_spans(article_xml, "ArticleId")
        .into_iter()
        .find(|id| id.starts_with("PMC"));
    Some(RawDocument {
        pmid,
        pmc_id,
        title,
        text,
        publication_year,
        journal,
        publication_types,
    })
}

impl DocumentSource for EutilsClient {
    fn search(&self, query: &str) -> Result<Vec<String>> {
        let body = self.get(
            "esearch.fcgi",
            &[("db", "pubmed"), ("term", query), ("retmode", "json"), ("retmax", "10000")],
        )?;
        let value: serde_json::Value = serde_json::from_str(&body)
            .map_err(|e| Error::transport(format!("esearch JSON: {e}"), false))?;
        let ids = value["esearchresult"]["idlist"]
            .as_array()
            .ok_or_else(|| Error::transport("esearch response lacks idlist", false))?;
        Ok(ids
            .iter()
            .filter_map(|v| v.as_str().map(str::to_string))
            .collect())
    }

    fn fetch(&self, pmids: &[String]) -> Result<Vec<RawDocument>> {
        if pmids.is_empty() {
            return Ok(Vec::new());
        }
        let ids = pmids.join(",");
        let body = self.get(
            "efetch.fcgi",
            &[("db", "pubmed"), ("id", &ids), ("retmode", "xml")],
        )?;
        let mut docs = Vec::new();
        for chunk in body.split("<PubmedArticle>").skip(1) {
            if let Some(doc) = parse_pubmed_article(chunk) {
                if !doc.text.is_empty() || !doc.title.is_empty() {
                    docs.push(doc);
                }
            }
        }
        Ok(docs)
    }

    fn version(&self) -> String {
        "eutils-pubmed".into()
    }
}
