//! Triple and property TSV files.
//!
//! Triples: `head_etype\thead_key\trel\ttail_etype\ttail_key`.
//! Properties: `etype\tkey\tprop\tvalue` (currently only `ftime` on trips).
//! UTF-8, LF line endings, no header. Triples are written grouped by head
//! entity in creation order, relations in schema order, tails in insertion
//! order; rebuilding from the file therefore reproduces the adjacency order.

use std::io::{BufRead, BufReader, Read, Write};

use super::{Direction, EntityRef, EntityType, Relation, TripKG};
use crate::error::{Error, Result};

fn check_key(key: &str) -> Result<&str> {
    if key.contains(['\t', '\n', '\r']) {
        return Err(Error::Schema(format!("key `{}` contains a tab or line break", key.escape_debug())));
    }
    Ok(key)
}

impl TripKG {
    pub fn write_triples<W: Write>(&self, mut out: W) -> Result<()> {
        for (i, head) in self.entities.iter().enumerate() {
            let id = super::EntityId(i as u32);
            for rel in Relation::ALL {
                for &tail in self.neighbor_ids(id, rel, Direction::Forward) {
                    let tail = self.entity(tail);
                    writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{}",
                        head.etype,
                        check_key(&head.key)?,
                        rel,
                        tail.etype,
                        check_key(&tail.key)?
                    )?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_properties<W: Write>(&self, mut out: W) -> Result<()> {
        for &t in self.ids_of(EntityType::Trip) {
            if let Some(ftime) = self.ftime(t) {
                writeln!(out, "Trip\t{}\tftime\t{ftime}", check_key(&self.entity(t).key)?)?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn triples_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_triples(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("keys are UTF-8")
    }

    pub fn properties_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_properties(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("keys are UTF-8")
    }

    /// Rebuilds a graph from triple and property files and validates it.
    pub fn read_tsv<R1: Read, R2: Read>(triples: R1, properties: R2) -> Result<TripKG> {
        let mut g = TripKG::new();
        for (n, line) in BufReader::new(triples).lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let bad = |reason: String| Error::GraphFormat { line: n + 1, reason };
            let f: Vec<&str> = line.split('\t').collect();
            let [ht, hk, rel, tt, tk] = f[..] else {
                return Err(bad(format!("expected 5 fields, found {}", f.len())));
            };
            let head = EntityRef::new(ht.parse().map_err(|e: Error| bad(e.to_string()))?, hk);
            let tail = EntityRef::new(tt.parse().map_err(|e: Error| bad(e.to_string()))?, tk);
            let rel: Relation = rel.parse().map_err(|e: Error| bad(e.to_string()))?;
            g.add_triple(&head, rel, &tail).map_err(|e| bad(e.to_string()))?;
        }
        for (n, line) in BufReader::new(properties).lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let bad = |reason: String| Error::GraphFormat { line: n + 1, reason };
            let f: Vec<&str> = line.split('\t').collect();
            let ["Trip", key, "ftime", value] = f[..] else {
                return Err(bad("expected `Trip\\t<key>\\tftime\\t<HH:MM:SS>`".into()));
            };
            let id = g.id(EntityType::Trip, key).ok_or_else(|| bad(format!("unknown trip `{key}`")))?;
            let t = crate::time::TimeOfDay::parse_trip_time(value).map_err(|e| bad(e.to_string()))?;
            g.set_ftime(id, t);
        }
        g.check_schema()?;
        Ok(g)
    }
}
