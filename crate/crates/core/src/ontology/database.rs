use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Domain, ItemRecord, PRIMARY_KEY};
use crate::error::{Error, Result};

/// Seed used to generate the bundled `data/restaurants.tsv`.
pub const BUNDLED_DB_SEED: u64 = 1;

const BUNDLED_TSV: &str = include_str!("../../data/restaurants.tsv");

/// Items behind the provider. Immutable once built; item order is the
/// canonical result order for every query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Database {
    domain: Domain,
    items: Vec<ItemRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryResult<'a> {
    pub items: Vec<&'a ItemRecord>,
    /// Entropy in bits of each informable slot's value distribution over `items`.
    pub slot_entropies: BTreeMap<String, f64>,
}

impl QueryResult<'_> {
    pub fn count(&self) -> usize {
        self.items.len()
    }

    /// Informable slot with the highest entropy; ties go to the earliest slot name.
    pub fn highest_entropy_slot(&self) -> Option<&str> {
        let mut best: Option<(&str, f64)> = None;
        for (slot, &h) in &self.slot_entropies {
            if h > 0.0 && best.is_none_or(|(_, b)| h > b) {
                best = Some((slot, h));
            }
        }
        best.map(|(s, _)| s)
    }
}

impl Database {
    pub fn new(domain: Domain, items: Vec<ItemRecord>) -> Result<Self> {
        let slots = domain.all_slots();
        for (i, item) in items.iter().enumerate() {
            for slot in &slots {
                let Some(value) = item.get(slot) else {
                    return Err(Error::Schema {
                        path: "<memory>".into(),
                        message: format!("item {i} is missing slot `{slot}`"),
                    });
                };
                if let Some(values) = domain.values(slot) {
                    if !values.iter().any(|v| v == value) {
                        return Err(Error::Schema {
                            path: "<memory>".into(),
                            message: format!("item {i}: `{value}` is not a value of `{slot}`"),
                        });
                    }
                }
            }
        }
        Ok(Database { domain, items })
    }

    /// The bundled 100-item restaurant database.
    pub fn bundled() -> Self {
        Self::parse(Domain::restaurants(), BUNDLED_TSV, "<bundled>")
            .expect("bundled database parses")
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn items(&self) -> &[ItemRecord] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn find_by_name(&self, name: &str) -> Option<&ItemRecord> {
        self.items.iter().find(|i| i.name() == name)
    }

    /// All values a slot takes across the database, in first-seen order.
    pub fn column(&self, slot: &str) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for item in &self.items {
            if let Some(v) = item.get(slot) {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn query(&self, constraints: &BTreeMap<String, String>) -> Result<QueryResult<'_>> {
        for slot in constraints.keys() {
            if !self.domain.has_slot(slot) {
                return Err(Error::DomainMismatch {
                    domain: self.domain.name.clone(),
                    slot: slot.clone(),
                });
            }
        }
        let dontcare = self.domain.dontcare.as_str();
        let items: Vec<&ItemRecord> = self
            .items
            .iter()
            .filter(|item| {
                constraints
                    .iter()
                    .all(|(s, v)| item.matches(s, v, dontcare))
            })
            .collect();
        let slot_entropies = self
            .domain
            .informable_slots()
            .map(|slot| (slot.to_string(), entropy_bits(&items, slot)))
            .collect();
        Ok(QueryResult {
            items,
            slot_entropies,
        })
    }

    pub fn load(path: impl AsRef<Path>, domain: Domain) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(domain, &text, &path.display().to_string())
    }

    /// Parses the tab-separated item format: a header row of slot names, then
    /// one item per line. Lines starting with `#` are comments.
    pub fn parse(domain: Domain, text: &str, origin: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .quoting(false)
            .comment(Some(b'#'))
            .flexible(true)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        for slot in domain.all_slots() {
            if !header.contains(&slot) {
                return Err(Error::Schema {
                    path: origin.to_string(),
                    message: format!("missing column `{slot}`"),
                });
            }
        }
        let mut items = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != header.len() {
                return Err(Error::Parse {
                    path: origin.to_string(),
                    line,
                    message: format!("expected {} fields, found {}", header.len(), record.len()),
                });
            }
            let mut item = ItemRecord::default();
            for (slot, value) in header.iter().zip(record.iter()) {
                if let Some(values) = domain.values(slot) {
                    if !values.iter().any(|v| v == value) {
                        return Err(Error::Parse {
                            path: origin.to_string(),
                            line,
                            message: format!("`{value}` is not a value of `{slot}`"),
                        });
                    }
                }
                item.values.insert(slot.clone(), value.to_string());
            }
            items.push(item);
        }
        Database::new(domain, items).map_err(|e| match e {
            Error::Schema { message, .. } => Error::Schema {
                path: origin.to_string(),
                message,
            },
            other => other,
        })
    }

    pub fn to_tsv(&self) -> String {
        let slots = self.domain.all_slots();
        let mut out = slots.join("\t");
        out.push('\n');
        for item in &self.items {
            let row: Vec<&str> = slots
                .iter()
                .map(|s| item.get(s).unwrap_or_default())
                .collect();
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

fn entropy_bits(items: &[&ItemRecord], slot: &str) -> f64 {
    if items.len() <= 1 {
        return 0.0;
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for item in items {
        *counts
            .entry(item.get(slot).unwrap_or_default())
            .or_default() += 1;
    }
    let n = items.len() as f64;
    let h: f64 = counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

const NAME_HEADS: &[&str] = &[
    "golden", "royal", "little", "old", "red", "blue", "green", "lucky", "happy", "grand",
    "silver", "jade",
];
const NAME_TAILS: &[&str] = &[
    "dragon", "garden", "kitchen", "house", "curry", "wok", "table", "oak", "lantern", "spoon",
];
const STREETS: &[&str] = &[
    "regent street",
    "mill road",
    "hills road",
    "king street",
    "bridge street",
    "market square",
    "trumpington road",
    "newmarket road",
    "castle street",
    "station road",
];
const LETTERS: &[u8] = b"abdefghjlnpqrstuwxyz";

/// Seed-deterministic synthetic database. When `n_items` is at least the
/// size of the largest value list, every informable value appears.
pub fn generate_database(domain: &Domain, n_items: usize, seed: u64) -> Result<Database> {
    if n_items == 0 {
        return Err(Error::Config("n_items must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut names: Vec<String> = NAME_HEADS
        .iter()
        .flat_map(|h| NAME_TAILS.iter().map(move |t| format!("the {h} {t}")))
        .collect();
    names.shuffle(&mut rng);

    let mut covers: Vec<(String, Vec<String>)> = domain
        .informable_slots()
        .map(|slot| {
            let mut values = domain.values(slot).unwrap_or_default().to_vec();
            values.shuffle(&mut rng);
            (slot.to_string(), values)
        })
        .collect();

    let mut items = Vec::with_capacity(n_items);
    for i in 0..n_items {
        let mut item = ItemRecord::default();
        for (slot, shuffled) in &mut covers {
            let value = if i < shuffled.len() {
                shuffled[i].clone()
            } else {
                shuffled[rng.random_range(0..shuffled.len())].clone()
            };
            item.values.insert(slot.clone(), value);
        }
        let name = if i < names.len() {
            names[i].clone()
        } else {
            format!("{} {}", names[i % names.len()], i / names.len() + 1)
        };
        let phone = format!("01223 {:06}", rng.random_range(100_000..1_000_000));
        let addr = format!(
            "{} {}",
            rng.random_range(1..200),
            STREETS[rng.random_range(0..STREETS.len())]
        );
        let letter = |rng: &mut ChaCha8Rng| LETTERS[rng.random_range(0..LETTERS.len())] as char;
        let postcode = format!(
            "c.b {}, {} {}.{}",
            rng.random_range(1..6),
            rng.random_range(1..10),
            letter(&mut rng),
            letter(&mut rng)
        );
        let extra = [
            (PRIMARY_KEY, name),
            ("addr", addr),
            ("phone", phone),
            ("postcode", postcode),
        ];
        for slot in domain.requestable_slots() {
            if item.values.contains_key(slot) {
                continue;
            }
            let value = extra
                .iter()
                .find(|(s, _)| s == slot)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(|| format!("{slot} {i}"));
            item.values.insert(slot.clone(), value);
        }
        items.push(item);
    }
    Database::new(domain.clone(), items)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force<'a>(db: &'a Database, c: &BTreeMap<String, String>) -> Vec<&'a ItemRecord> {
        let mut out = Vec::new();
        for item in db.items() {
            let mut ok = true;
            for (s, v) in c {
                if v != "dontcare" && item.values[s] != *v {
                    ok = false;
                }
            }
            if ok {
                out.push(item);
            }
        }
        out
    }

    fn cons(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn empty_constraints_match_everything() {
        let db = Database::bundled();
        assert_eq!(db.len(), 100);
        let r = db.query(&BTreeMap::new()).unwrap();
        assert_eq!(r.count(), 100);
    }

    #[test]
    fn unknown_slot_is_domain_mismatch() {
        let db = Database::bundled();
        let err = db.query(&cons(&[("stars", "5")])).unwrap_err();
        assert!(matches!(err, Error::DomainMismatch { .. }));
    }

    #[test]
    fn two_way_split_has_one_bit_of_entropy() {
        let db = Database::bundled();
        let north = db
            .items()
            .iter()
            .find(|i| i.values["area"] == "north")
            .unwrap();
        let south = db
            .items()
            .iter()
            .find(|i| i.values["area"] == "south")
            .unwrap();
        let two = Database::new(db.domain().clone(), vec![north.clone(), south.clone()]).unwrap();
        let r = two.query(&BTreeMap::new()).unwrap();
        // -2 * (0.5 * log2 0.5)
        assert!((r.slot_entropies["area"] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_match_has_zero_entropy() {
        let db = Database::bundled();
        let name = db.items()[3].name().to_string();
        let r = db.query(&cons(&[("name", &name)])).unwrap();
        assert_eq!(r.count(), 1);
        assert!(r.slot_entropies.values().all(|&h| h == 0.0));
        assert_eq!(r.highest_entropy_slot(), None);
    }

    #[test]
    fn query_equals_brute_force_on_all_value_pairs() {
        let db = Database::bundled();
        let d = db.domain().clone();
        let mut with_dc: Vec<String> = d.values("food").unwrap().to_vec();
        with_dc.push("dontcare".into());
        for food in &with_dc {
            for price in d.values("pricerange").unwrap() {
                for area in d.values("area").unwrap() {
                    let c = cons(&[("food", food), ("pricerange", price), ("area", area)]);
                    let got = db.query(&c).unwrap();
                    assert_eq!(got.items, brute_force(&db, &c));
                    for (slot, &h) in &got.slot_entropies {
                        let k = d.values(slot).unwrap().len() as f64;
                        assert!((0.0..=k.log2() + 1e-12).contains(&h));
                    }
                }
            }
        }
    }

    #[test]
    fn generation_is_deterministic_and_covers_values() {
        let d = Domain::restaurants();
        let a = generate_database(&d, 100, 1).unwrap();
        let b = generate_database(&d, 100, 1).unwrap();
        assert_eq!(a, b);
        for slot in ["food", "area", "pricerange"] {
            for v in d.values(slot).unwrap() {
                assert!(
                    a.items().iter().any(|i| i.values[slot] == *v),
                    "{slot}={v} missing"
                );
            }
        }
        let names: std::collections::BTreeSet<_> = a.items().iter().map(|i| i.name()).collect();
        assert_eq!(names.len(), 100);
    }

    #[test]
    fn bundled_file_matches_generator() {
        let generated = generate_database(&Domain::restaurants(), 100, BUNDLED_DB_SEED).unwrap();
        assert_eq!(Database::bundled(), generated);
        assert_eq!(generated.to_tsv(), BUNDLED_TSV);
    }

    #[test]
    fn save_then_load_round_trips() {
        let db = Database::bundled();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.tsv");
        db.save(&path).unwrap();
        assert_eq!(Database::load(&path, Domain::restaurants()).unwrap(), db);
    }

    #[test]
    fn malformed_row_reports_line() {
        let text = "name\tfood\tarea\tpricerange\taddr\tphone\tpostcode\n\
                    a\titalian\tnorth\tcheap\t1 x road\t01223 1\tc.b 1, 1 a.b\n\
                    b\titalian\tnorth\n";
        match Database::parse(Domain::restaurants(), text, "t.tsv").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
        let bad_value = "name\tfood\tarea\tpricerange\taddr\tphone\tpostcode\n\
                    a\tpizza\tnorth\tcheap\t1 x road\t01223 1\tc.b 1, 1 a.b\n";
        assert!(matches!(
            Database::parse(Domain::restaurants(), bad_value, "t.tsv").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
    }

    #[test]
    fn missing_column_is_schema_error() {
        let text = "name\tfood\tarea\tpricerange\taddr\tphone\na\titalian\tnorth\tcheap\tx\ty\n";
        assert!(matches!(
            Database::parse(Domain::restaurants(), text, "t.tsv").unwrap_err(),
            Error::Schema { .. }
        ));
    }
}
