//! Reading and writing basic-dependency CoNLL-U.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use super::{DependencyGraph, Edge, GraphError, NodeId, TokenNode};

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("sentence ending at line {line}: {source}")]
    Structure {
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

struct Row {
    id: NodeId,
    form: String,
    lemma: String,
    upos: String,
    head: NodeId,
    deprel: String,
    space_after: bool,
}

fn malformed(line: usize, message: impl Into<String>) -> ConlluError {
    ConlluError::Malformed {
        line,
        message: message.into(),
    }
}

/// Parses a CoNLL-U document into one graph per sentence block.
///
/// Multiword-token ranges (`1-2`) and empty nodes (`1.1`) are skipped. Rows
/// with `HEAD = 0` become roots without an incoming edge. Comment lines are
/// kept on the graph; `# text = ...` sets the sentence text, otherwise the
/// text is rebuilt from the token forms.
pub fn parse_conllu<R: BufRead>(reader: R) -> Result<Vec<DependencyGraph>, ConlluError> {
    let mut graphs = Vec::new();
    let mut comments: Vec<String> = Vec::new();
    let mut rows: Vec<Row> = Vec::new();
    let mut last_line = 0;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            if !rows.is_empty() || !comments.is_empty() {
                flush(&mut graphs, &mut comments, &mut rows, lineno)?;
            }
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim().to_string());
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(malformed(
                lineno,
                format!("expected 10 tab-separated columns, found {}", cols.len()),
            ));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let id: NodeId = cols[0]
            .parse()
            .map_err(|_| malformed(lineno, format!("ID `{}` is not an integer", cols[0])))?;
        let head: NodeId = cols[6]
            .parse()
            .map_err(|_| malformed(lineno, format!("HEAD `{}` is not an integer", cols[6])))?;
        if id == 0 {
            return Err(malformed(lineno, "ID must be at least 1"));
        }
        let form = cols[1].to_string();
        if form.is_empty() {
            return Err(malformed(lineno, "empty FORM"));
        }
        let lemma = if (cols[2] == "_" && form != "_") || cols[2].is_empty() {
            form.clone()
        } else {
            cols[2].to_string()
        };
        if cols[3].is_empty() || cols[3] == "_" {
            return Err(malformed(lineno, "missing UPOS"));
        }
        let space_after = !cols[9].split('|').any(|f| f == "SpaceAfter=No");
        rows.push(Row {
            id,
            form,
            lemma,
            upos: cols[3].to_string(),
            head,
            deprel: cols[7].to_string(),
            space_after,
        });
    }
    if !rows.is_empty() || !comments.is_empty() {
        flush(&mut graphs, &mut comments, &mut rows, last_line)?;
    }
    Ok(graphs)
}

fn flush(
    graphs: &mut Vec<DependencyGraph>,
    comments: &mut Vec<String>,
    rows: &mut Vec<Row>,
    line: usize,
) -> Result<(), ConlluError> {
    let comments = std::mem::take(comments);
    let rows = std::mem::take(rows);
    if rows.is_empty() {
        // comment-only block, e.g. a document header
        return Ok(());
    }
    let text = comments
        .iter()
        .find_map(|c| {
            let (k, v) = c.split_once('=')?;
            (k.trim() == "text").then(|| v.trim().to_string())
        })
        .unwrap_or_else(|| {
            let mut s = String::new();
            for r in &rows {
                s.push_str(&r.form);
                if r.space_after {
                    s.push(' ');
                }
            }
            s.trim_end().to_string()
        });

    let mut nodes = Vec::with_capacity(rows.len());
    let mut edges = Vec::new();
    for r in &rows {
        if r.head != 0 {
            if !rows.iter().any(|o| o.id == r.head) {
                return Err(ConlluError::Structure {
                    line,
                    source: GraphError::DanglingEdge {
                        head: r.head,
                        dependent: r.id,
                    },
                });
            }
            edges.push(Edge::new(r.head, r.id, &r.deprel));
        }
        let mut n = TokenNode::new(r.id, &r.form, &r.lemma, &r.upos);
        n.space_after = r.space_after;
        nodes.push(n);
    }
    let graph = DependencyGraph::new(nodes, edges, text)
        .map_err(|source| ConlluError::Structure { line, source })?
        .with_comments(comments);
    graphs.push(graph);
    Ok(())
}

/// Writes graphs as CoNLL-U. XPOS, FEATS and DEPS are emitted as `_`; the
/// deprel of a root row is `root`.
pub fn write_conllu<W: Write>(mut out: W, graphs: &[DependencyGraph]) -> io::Result<()> {
    for g in graphs {
        let has_text = g.comment_value("text").is_some();
        for c in g.comments() {
            writeln!(out, "# {c}")?;
        }
        if !has_text {
            writeln!(out, "# text = {}", g.sentence_text())?;
        }
        for n in g.nodes() {
            let (head, rel) = match g.head_of(n.id) {
                Some(e) => (e.head, e.deprel.as_str()),
                None => (0, "root"),
            };
            let misc = if n.space_after { "_" } else { "SpaceAfter=No" };
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t{}",
                n.id, n.text, n.lemma, n.upos, head, rel, misc
            )?;
        }
        writeln!(out)?;
    }
    Ok(())
}
