//! MeSH descriptor vocabulary.
//!
//! Two on-disk formats are understood: NLM's ASCII descriptor dump
//! (`*NEWRECORD` blocks with `MH = `, `MN = `, `UI = ` fields) and a canonical
//! three-column TSV (`id`, `name`, `;`-separated tree numbers). Records without
//! any tree number are skipped and counted in the [`LoadReport`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub const TSV_HEADER: &str = "id\tname\ttree_numbers";

/// A dot-separated MeSH tree position such as `A08.186.211`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeNumber {
    raw: String,
    branch: char,
    depth: usize,
}

impl TreeNumber {
    pub fn parse(raw: &str) -> Result<Self> {
        let raw = raw.trim();
        let branch = raw
            .chars()
            .next()
            .filter(|c| c.is_ascii_uppercase())
            .ok_or_else(|| Error::InvalidTreeNumber(raw.to_string()))?;
        if raw.split('.').any(str::is_empty) {
            return Err(Error::InvalidTreeNumber(raw.to_string()));
        }
        Ok(TreeNumber {
            raw: raw.to_string(),
            branch,
            depth: 1 + raw.matches('.').count(),
        })
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn branch(&self) -> char {
        self.branch
    }

    /// Tree level; `A08` is depth 1, `A08.186.211` depth 3.
    pub fn depth(&self) -> usize {
        self.depth
    }
}

impl FromStr for TreeNumber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TreeNumber::parse(s)
    }
}

impl fmt::Display for TreeNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeshDescriptor {
    id: String,
    name: String,
    tree_numbers: Vec<TreeNumber>,
    branches: BTreeSet<char>,
    primary_branch: char,
}

impl MeshDescriptor {
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        tree_numbers: Vec<TreeNumber>,
    ) -> Result<Self> {
        let id = id.into();
        let primary = primary_tree_number(&tree_numbers)
            .ok_or_else(|| Error::InvalidArgument(format!("descriptor {id} has no tree numbers")))?
            .branch;
        let branches = tree_numbers.iter().map(TreeNumber::branch).collect();
        Ok(MeshDescriptor {
            id,
            name: name.into(),
            tree_numbers,
            branches,
            primary_branch: primary,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tree_numbers(&self) -> &[TreeNumber] {
        &self.tree_numbers
    }

    pub fn branches(&self) -> &BTreeSet<char> {
        &self.branches
    }

    pub fn in_branch(&self, letter: char) -> bool {
        self.branches.contains(&letter)
    }

    pub fn primary_branch(&self) -> char {
        self.primary_branch
    }
}

/// The home branch of a descriptor: the branch of its shallowest tree number,
/// ties broken by branch letter and then by the raw tree number.
pub fn primary_branch(descriptor: &MeshDescriptor) -> char {
    descriptor.primary_branch
}

fn primary_tree_number(tree_numbers: &[TreeNumber]) -> Option<&TreeNumber> {
    tree_numbers
        .iter()
        .min_by(|a, b| (a.depth, a.branch, &a.raw).cmp(&(b.depth, b.branch, &b.raw)))
}

/// Case-folded, trimmed form used for name lookups.
pub fn normalize_name(name: &str) -> String {
    name.trim().to_lowercase()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub loaded: usize,
    pub skipped_no_tree_numbers: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    descriptors: BTreeMap<String, MeshDescriptor>,
    name_index: HashMap<String, String>,
}

impl Vocabulary {
    pub fn from_descriptors(descriptors: impl IntoIterator<Item = MeshDescriptor>) -> Result<Self> {
        let mut vocab = Vocabulary::default();
        let mut duplicates = Vec::new();
        for d in descriptors {
            let key = normalize_name(&d.name);
            if vocab.descriptors.contains_key(&d.id) {
                duplicates.push(format!("id {}", d.id));
                continue;
            }
            if let Some(other) = vocab.name_index.get(&key) {
                duplicates.push(format!("name {:?} ({} and {})", d.name, other, d.id));
                continue;
            }
            vocab.name_index.insert(key, d.id.clone());
            vocab.descriptors.insert(d.id.clone(), d);
        }
        if duplicates.is_empty() {
            Ok(vocab)
        } else {
            Err(Error::DuplicateDescriptors(duplicates))
        }
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&MeshDescriptor> {
        self.descriptors.get(id)
    }

    pub fn by_name(&self, name: &str) -> Option<&MeshDescriptor> {
        self.name_index
            .get(&normalize_name(name))
            .and_then(|id| self.descriptors.get(id))
    }

    /// Resolves a corpus term that may be either a descriptor id or a name.
    pub fn resolve(&self, term: &str) -> Option<&MeshDescriptor> {
        self.get(term.trim()).or_else(|| self.by_name(term))
    }

    /// Descriptors in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = &MeshDescriptor> {
        self.descriptors.values()
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{TSV_HEADER}")?;
        for d in self.iter() {
            let trees: Vec<&str> = d.tree_numbers.iter().map(TreeNumber::raw).collect();
            writeln!(out, "{}\t{}\t{}", d.id, d.name, trees.join(";"))?;
        }
        Ok(())
    }
}

pub fn load_mesh_ascii(path: impl AsRef<Path>) -> Result<(Vocabulary, LoadReport)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mesh_ascii(&text)
}

pub fn load_mesh_tsv(path: impl AsRef<Path>) -> Result<(Vocabulary, LoadReport)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mesh_tsv(&text)
}

/// Loads either format, choosing by content: a file whose first non-blank
/// line is `*NEWRECORD` is treated as the ASCII dump.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<(Vocabulary, LoadReport)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let first = text.lines().map(str::trim).find(|l| !l.is_empty());
    match first {
        Some(line) if line.starts_with("*NEWRECORD") => parse_mesh_ascii(&text),
        None => Ok((Vocabulary::default(), LoadReport::default())),
        Some(_) => parse_mesh_tsv(&text),
    }
}

const RECORD_MARK: &str = "*NEWRECORD";

pub fn parse_mesh_ascii(text: &str) -> Result<(Vocabulary, LoadReport)> {
    let mut report = LoadReport::default();
    let mut descriptors = Vec::new();

    // Byte offsets of every record marker at the start of a line.
    let mut starts = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if line.trim_end().eq(RECORD_MARK) {
            starts.push(offset);
        }
        offset += line.len();
    }
    if starts.is_empty() && !text.trim().is_empty() {
        return Err(Error::MalformedRecord {
            offset: 0,
            reason: format!("no {RECORD_MARK} marker found"),
        });
    }

    for (i, &start) in starts.iter().enumerate() {
        let end = starts.get(i + 1).copied().unwrap_or(text.len());
        let body = &text[start + RECORD_MARK.len()..end];
        let mut name = None;
        let mut id = None;
        let mut trees = Vec::new();
        for line in body.lines() {
            let Some((key, value)) = line.split_once(" = ") else {
                continue;
            };
            let value = value.trim();
            match key.trim() {
                "MH" => name = Some(value.to_string()),
                "UI" => id = Some(value.to_string()),
                "MN" => {
                    trees.push(
                        TreeNumber::parse(value).map_err(|_| Error::MalformedRecord {
                            offset: start,
                            reason: format!("bad tree number {value:?}"),
                        })?,
                    )
                }
                _ => {}
            }
        }
        let name = name.ok_or_else(|| Error::MalformedRecord {
            offset: start,
            reason: "missing MH field".into(),
        })?;
        if trees.is_empty() {
            report.skipped_no_tree_numbers += 1;
            continue;
        }
        let id = id.ok_or_else(|| Error::MalformedRecord {
            offset: start,
            reason: "missing UI field".into(),
        })?;
        descriptors.push(MeshDescriptor::new(id, name, trees)?);
    }

    report.loaded = descriptors.len();
    Ok((Vocabulary::from_descriptors(descriptors)?, report))
}

pub fn parse_mesh_tsv(text: &str) -> Result<(Vocabulary, LoadReport)> {
    let mut report = LoadReport::default();
    let mut descriptors = Vec::new();
    let mut lines = text.lines().enumerate();

    match lines.next() {
        None => return Ok((Vocabulary::default(), report)),
        Some((_, header)) if header.trim_end_matches('\r') == TSV_HEADER => {}
        Some(_) => {
            return Err(Error::MalformedLine {
                line: 1,
                reason: format!("expected header {TSV_HEADER:?}"),
            })
        }
    }

    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::MalformedLine {
                line: line_no,
                reason: format!("expected 3 tab-separated columns, found {}", cols.len()),
            });
        }
        let trees = cols[2]
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(TreeNumber::parse)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::MalformedLine {
                line: line_no,
                reason: e.to_string(),
            })?;
        if trees.is_empty() {
            report.skipped_no_tree_numbers += 1;
            continue;
        }
        descriptors.push(MeshDescriptor::new(cols[0].trim(), cols[1].trim(), trees)?);
    }

    report.loaded = descriptors.len();
    Ok((Vocabulary::from_descriptors(descriptors)?, report))
}
