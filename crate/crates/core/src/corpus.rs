//! Publication corpora and their ingestion from JSONL or MEDLINE text.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Vocabulary;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Publication {
    pub id: String,
    pub year: i32,
    /// Resolved descriptor ids, sorted and deduplicated.
    #[serde(rename = "mesh")]
    pub mesh_ids: Vec<String>,
}

impl Publication {
    pub fn new(
        id: impl Into<String>,
        year: i32,
        mesh_ids: impl IntoIterator<Item = String>,
    ) -> Self {
        let set: BTreeSet<String> = mesh_ids.into_iter().collect();
        Publication {
            id: id.into(),
            year,
            mesh_ids: set.into_iter().collect(),
        }
    }

    pub fn mesh_count(&self) -> usize {
        self.mesh_ids.len()
    }
}

/// Inclusive publication-year window; either bound may be open.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct YearRange {
    pub min: Option<i32>,
    pub max: Option<i32>,
}

impl YearRange {
    pub fn new(min: i32, max: i32) -> Self {
        YearRange {
            min: Some(min),
            max: Some(max),
        }
    }

    pub fn unbounded() -> Self {
        YearRange::default()
    }

    pub fn contains(&self, year: i32) -> bool {
        self.min.is_none_or(|lo| year >= lo) && self.max.is_none_or(|hi| year <= hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnresolvedTerm {
    pub name: String,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub excluded_no_mesh: usize,
    pub excluded_year: usize,
    pub duplicate_ids: usize,
    pub skipped_malformed: usize,
    pub unresolved_terms: Vec<UnresolvedTerm>,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    query_label: String,
    publications: Vec<Publication>,
    by_year: BTreeMap<i32, Vec<usize>>,
    vocabulary: Arc<Vocabulary>,
}

impl Corpus {
    /// Builds a corpus in canonical order (year, then id). Every descriptor id
    /// must resolve and every publication must carry at least one descriptor.
    pub fn new(
        query_label: impl Into<String>,
        mut publications: Vec<Publication>,
        vocabulary: Arc<Vocabulary>,
    ) -> Result<Self> {
        for p in &publications {
            if p.mesh_ids.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "publication {} has no descriptors",
                    p.id
                )));
            }
            if let Some(missing) = p.mesh_ids.iter().find(|m| vocabulary.get(m).is_none()) {
                return Err(Error::UnresolvedDescriptor(missing.clone()));
            }
        }
        publications.sort_by(|a, b| (a.year, &a.id).cmp(&(b.year, &b.id)));
        let mut by_year: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, p) in publications.iter().enumerate() {
            by_year.entry(p.year).or_default().push(i);
        }
        Ok(Corpus {
            query_label: query_label.into(),
            publications,
            by_year,
            vocabulary,
        })
    }

    pub fn query_label(&self) -> &str {
        &self.query_label
    }

    pub fn publications(&self) -> &[Publication] {
        &self.publications
    }

    pub fn len(&self) -> usize {
        self.publications.len()
    }

    pub fn is_empty(&self) -> bool {
        self.publications.is_empty()
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn vocabulary_arc(&self) -> &Arc<Vocabulary> {
        &self.vocabulary
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.by_year.keys().copied()
    }

    pub fn year_indices(&self, year: i32) -> &[usize] {
        self.by_year.get(&year).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn publications_in(&self, year: i32) -> impl Iterator<Item = &Publication> {
        self.year_indices(year)
            .iter()
            .map(|&i| &self.publications[i])
    }

    /// V_q: number of distinct descriptors used anywhere in the corpus.
    pub fn vocabulary_size(&self) -> usize {
        self.publications
            .iter()
            .flat_map(|p| p.mesh_ids.iter())
            .collect::<HashSet<_>>()
            .len()
    }

    /// Writes one JSON object per publication in canonical order.
    pub fn write_canonical_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for p in &self.publications {
            serde_json::to_writer(&mut out, p)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Collects raw records into a corpus, applying the exclusion rules shared by
/// both input formats.
struct Ingestor<'a> {
    vocabulary: &'a Vocabulary,
    range: YearRange,
    seen: HashSet<String>,
    unresolved: BTreeMap<String, usize>,
    report: IngestReport,
    publications: Vec<Publication>,
}

impl<'a> Ingestor<'a> {
    fn new(vocabulary: &'a Vocabulary, range: YearRange) -> Self {
        Ingestor {
            vocabulary,
            range,
            seen: HashSet::new(),
            unresolved: BTreeMap::new(),
            report: IngestReport::default(),
            publications: Vec::new(),
        }
    }

    fn push<'t>(&mut self, id: String, year: i32, terms: impl IntoIterator<Item = &'t str>) {
        if !self.seen.insert(id.clone()) {
            self.report.duplicate_ids += 1;
            return;
        }
        if !self.range.contains(year) {
            self.report.excluded_year += 1;
            return;
        }
        let mut ids = Vec::new();
        for term in terms {
            match self.vocabulary.resolve(term) {
                Some(d) => ids.push(d.id().to_string()),
                None => *self.unresolved.entry(term.trim().to_string()).or_default() += 1,
            }
        }
        if ids.is_empty() {
            self.report.excluded_no_mesh += 1;
            return;
        }
        self.publications.push(Publication::new(id, year, ids));
    }

    fn finish(
        mut self,
        label: &str,
        vocabulary: Arc<Vocabulary>,
    ) -> Result<(Corpus, IngestReport)> {
        self.report.unresolved_terms = self
            .unresolved
            .into_iter()
            .map(|(name, count)| UnresolvedTerm { name, count })
            .collect();
        Ok((
            Corpus::new(label, self.publications, vocabulary)?,
            self.report,
        ))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawId {
    Text(String),
    Number(u64),
}

#[derive(Deserialize)]
struct RawRecord {
    id: RawId,
    year: i32,
    mesh: Vec<String>,
}

pub fn ingest_jsonl(
    path: impl AsRef<Path>,
    vocabulary: Arc<Vocabulary>,
    range: YearRange,
) -> Result<(Corpus, IngestReport)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_jsonl(&text, &label_from_path(path), vocabulary, range)
}

pub fn parse_jsonl(
    text: &str,
    label: &str,
    vocabulary: Arc<Vocabulary>,
    range: YearRange,
) -> Result<(Corpus, IngestReport)> {
    let mut ingest = Ingestor::new(&vocabulary, range);
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: RawRecord = serde_json::from_str(line).map_err(|e| Error::MalformedLine {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        let id = match rec.id {
            RawId::Text(s) => s,
            RawId::Number(n) => n.to_string(),
        };
        ingest.push(id, rec.year, rec.mesh.iter().map(String::as_str));
    }
    ingest.finish(label, vocabulary.clone())
}

pub fn ingest_medline_text(
    path: impl AsRef<Path>,
    vocabulary: Arc<Vocabulary>,
    range: YearRange,
) -> Result<(Corpus, IngestReport)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_medline_text(&text, &label_from_path(path), vocabulary, range)
}

/// Reads either corpus format, choosing JSONL when the first non-blank
/// character is `{`.
pub fn ingest_corpus(
    path: impl AsRef<Path>,
    vocabulary: Arc<Vocabulary>,
    range: YearRange,
) -> Result<(Corpus, IngestReport)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let label = label_from_path(path);
    if text.trim_start().starts_with('{') {
        parse_jsonl(&text, &label, vocabulary, range)
    } else {
        parse_medline_text(&text, &label, vocabulary, range)
    }
}

/// Strips the major-topic marker and any qualifier suffix from an `MH` value:
/// `*DNA, Viral/analysis` becomes `DNA, Viral`.
pub fn clean_heading(value: &str) -> &str {
    let value = value.trim().trim_start_matches('*');
    value.split('/').next().unwrap_or("").trim()
}

/// First run of exactly four ASCII digits in a `DP` value.
pub fn year_from_date(value: &str) -> Option<i32> {
    value
        .split(|c: char| !c.is_ascii_digit())
        .find(|tok| tok.len() == 4)
        .and_then(|tok| tok.parse().ok())
}

#[derive(Default)]
struct MedlineRecord {
    fields: Vec<(String, String)>,
}

impl MedlineRecord {
    fn first(&self, tag: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(t, _)| t == tag)
            .map(|(_, v)| v.as_str())
    }

    fn all<'s>(&'s self, tag: &'s str) -> impl Iterator<Item = &'s str> + 's {
        self.fields
            .iter()
            .filter(move |(t, _)| t == tag)
            .map(|(_, v)| v.as_str())
    }
}

fn medline_records(text: &str) -> Vec<MedlineRecord> {
    let mut records = Vec::new();
    let mut current = MedlineRecord::default();
    for raw in text.lines() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !current.fields.is_empty() {
                records.push(std::mem::take(&mut current));
            }
            continue;
        }
        if line.len() >= 6 && line.is_char_boundary(4) && &line[4..6] == "- " {
            current
                .fields
                .push((line[..4].trim().to_string(), line[6..].trim().to_string()));
        } else if line.starts_with(' ') {
            if let Some((_, v)) = current.fields.last_mut() {
                v.push(' ');
                v.push_str(line.trim());
            }
        }
    }
    if !current.fields.is_empty() {
        records.push(current);
    }
    records
}

pub fn parse_medline_text(
    text: &str,
    label: &str,
    vocabulary: Arc<Vocabulary>,
    range: YearRange,
) -> Result<(Corpus, IngestReport)> {
    let mut ingest = Ingestor::new(&vocabulary, range);
    for rec in medline_records(text) {
        let id = rec.first("PMID").map(str::trim).filter(|s| !s.is_empty());
        let year = rec.first("DP").and_then(year_from_date);
        let (Some(id), Some(year)) = (id, year) else {
            ingest.report.skipped_malformed += 1;
            continue;
        };
        let headings: Vec<&str> = rec
            .all("MH")
            .map(clean_heading)
            .filter(|h| !h.is_empty())
            .collect();
        ingest.push(id.to_string(), year, headings);
    }
    ingest.finish(label, vocabulary.clone())
}

fn label_from_path(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearSize {
    pub year: i32,
    /// A_q(y)
    pub publications: usize,
    /// M_q(y): descriptor assignments
    pub assignments: usize,
    /// V_q(y): distinct descriptors
    pub distinct: usize,
    pub mean_mesh_per_pub: f64,
}

/// Per-year publication and descriptor totals; years without publications are
/// not listed.
pub fn yearly_sizes(corpus: &Corpus) -> Vec<YearSize> {
    corpus
        .years()
        .map(|year| {
            let mut assignments = 0;
            let mut distinct = HashSet::new();
            let mut publications = 0;
            for p in corpus.publications_in(year) {
                publications += 1;
                assignments += p.mesh_count();
                distinct.extend(p.mesh_ids.iter());
            }
            YearSize {
                year,
                publications,
                assignments,
                distinct: distinct.len(),
                mean_mesh_per_pub: assignments as f64 / publications as f64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::parse_mesh_tsv;

    fn vocab() -> Arc<Vocabulary> {
        let text = "id\tname\ttree_numbers\n\
                    D1\tDNA, Viral\tD13.444\n\
                    D2\tPolymerase Chain Reaction\tE05.393\n\
                    D3\tPapillomavirus Infections\tC02.256\n\
                    D4\tHumans\tB01.050\n";
        Arc::new(parse_mesh_tsv(text).unwrap().0)
    }

    #[test]
    fn jsonl_excludes_empty_mesh() {
        let text = r#"{"id":"1","year":2000,"mesh":["D1","Humans"]}
{"id":"2","year":2000,"mesh":[]}
{"id":"3","year":2001,"mesh":["polymerase chain reaction"]}
"#;
        let (corpus, report) = parse_jsonl(text, "q", vocab(), YearRange::unbounded()).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(report.excluded_no_mesh, 1);
        assert_eq!(corpus.publications()[1].mesh_ids, vec!["D2"]);
    }

    #[test]
    fn jsonl_year_filter_duplicates_and_unresolved() {
        let text = r#"{"id":"1","year":2013,"mesh":["D1","Nope"]}
{"id":"1","year":2013,"mesh":["D2"]}
{"id":"2","year":2014,"mesh":["D1"]}
{"id":3,"year":2012,"mesh":["Nope","D3"]}
"#;
        let (corpus, report) = parse_jsonl(text, "q", vocab(), YearRange::new(1963, 2013)).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(report.excluded_year, 1);
        assert_eq!(report.duplicate_ids, 1);
        assert_eq!(
            report.unresolved_terms,
            vec![UnresolvedTerm {
                name: "Nope".into(),
                count: 2
            }]
        );
        // canonical order is (year, id)
        assert_eq!(corpus.publications()[0].id, "3");
    }

    #[test]
    fn jsonl_malformed_line_number() {
        let text = "{\"id\":\"1\",\"year\":2000,\"mesh\":[\"D1\"]}\n{not json\n";
        match parse_jsonl(text, "q", vocab(), YearRange::unbounded()) {
            Err(Error::MalformedLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn medline_heading_cleanup() {
        assert_eq!(clean_heading("*DNA, Viral/analysis"), "DNA, Viral");
        assert_eq!(clean_heading("Humans"), "Humans");
        assert_eq!(
            clean_heading("DNA, Viral/*genetics/isolation & purification"),
            "DNA, Viral"
        );
        assert_eq!(year_from_date("1999 Jan-Feb"), Some(1999));
        assert_eq!(year_from_date("Spring"), None);
    }

    #[test]
    fn medline_records_parsed() {
        let text = "PMID- 100\nDP  - 1999 Jan\nTI  - A title that\n      continues\nMH  - *DNA, Viral/analysis\nMH  - Humans\nMH  - DNA, Viral/genetics\n\n\
PMID- 101\nDP  - 2001\nTI  - no headings\n\n\
DP  - 2002\nMH  - Humans\n\n\
PMID- 103\nDP  - unknown\nMH  - Humans\n";
        let (corpus, report) =
            parse_medline_text(text, "q", vocab(), YearRange::unbounded()).unwrap();
        assert_eq!(corpus.len(), 1);
        let p = &corpus.publications()[0];
        assert_eq!(p.year, 1999);
        assert_eq!(p.mesh_ids, vec!["D1", "D4"]);
        assert_eq!(report.excluded_no_mesh, 1);
        assert_eq!(report.skipped_malformed, 2);
    }

    #[test]
    fn yearly_sizes_rows() {
        let v = vocab();
        let pubs = vec![
            Publication::new("a", 2000, ["D1", "D2", "D3"].map(String::from)),
            Publication::new("b", 2000, ["D1", "D2", "D3", "D4", "D4"].map(String::from)),
            Publication::new("c", 2002, ["D4"].map(String::from)),
        ];
        let corpus = Corpus::new("q", pubs, v).unwrap();
        let rows = yearly_sizes(&corpus);
        assert_eq!(rows.len(), 2);
        assert_eq!(
            rows[0],
            YearSize {
                year: 2000,
                publications: 2,
                assignments: 7,
                distinct: 4,
                mean_mesh_per_pub: 3.5
            }
        );
        assert_eq!(rows[1].year, 2002);
    }

    #[test]
    fn canonical_round_trip() {
        let text = r#"{"id":"9","year":2001,"mesh":["Humans","D1","D1"]}
{"id":"2","year":2000,"mesh":["D3"]}
"#;
        let (corpus, _) = parse_jsonl(text, "q", vocab(), YearRange::unbounded()).unwrap();
        let mut first = Vec::new();
        corpus.write_canonical_jsonl(&mut first).unwrap();
        let (again, report) = parse_jsonl(
            std::str::from_utf8(&first).unwrap(),
            "q",
            vocab(),
            YearRange::unbounded(),
        )
        .unwrap();
        let mut second = Vec::new();
        again.write_canonical_jsonl(&mut second).unwrap();
        assert_eq!(first, second);
        assert_eq!(report, IngestReport::default());
    }
}
