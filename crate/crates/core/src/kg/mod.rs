//! Individual-level trip knowledge graph.
//!
//! Entities are interned once and addressed by [`EntityId`]; a per-type hash
//! index resolves natural keys, and every relation keeps a forward and a
//! reverse adjacency map, so entity lookup and one-hop expansion are
//! average-case constant time regardless of graph size.
//!
//! Each `Trip` entity carries exactly one `tripWeek`, `tripTimeSpan`,
//! `tripDate`, `tripOzone` and `tripDzone` edge and one incoming `hastrip`;
//! a `Vehicle` may carry one `TripType` edge once labels are attached. The
//! trip start time is stored as an entity property rather than a triple.

mod tsv;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::config::{CalendarConfig, TimeSpanConfig};
use crate::error::{Error, Result};
use crate::ingest::TripRecord;
use crate::time::TimeOfDay;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityType {
    Vehicle,
    Trip,
    Week,
    TimeSpan,
    Date,
    Zone,
    Label,
}

impl EntityType {
    pub const ALL: [EntityType; 7] = [
        EntityType::Vehicle,
        EntityType::Trip,
        EntityType::Week,
        EntityType::TimeSpan,
        EntityType::Date,
        EntityType::Zone,
        EntityType::Label,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Vehicle => "Vehicle",
            EntityType::Trip => "Trip",
            EntityType::Week => "Week",
            EntityType::TimeSpan => "TimeSpan",
            EntityType::Date => "Date",
            EntityType::Zone => "Zone",
            EntityType::Label => "Label",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EntityType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown entity type `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    HasTrip,
    TripWeek,
    TripTimeSpan,
    TripDate,
    TripOzone,
    TripDzone,
    TripType,
}

impl Relation {
    pub const ALL: [Relation; 7] = [
        Relation::HasTrip,
        Relation::TripWeek,
        Relation::TripTimeSpan,
        Relation::TripDate,
        Relation::TripOzone,
        Relation::TripDzone,
        Relation::TripType,
    ];

    /// The five relations every trip carries exactly once.
    pub const TRIP_ATTRIBUTES: [Relation; 5] = [
        Relation::TripWeek,
        Relation::TripTimeSpan,
        Relation::TripDate,
        Relation::TripOzone,
        Relation::TripDzone,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::HasTrip => "hastrip",
            Relation::TripWeek => "tripWeek",
            Relation::TripTimeSpan => "tripTimeSpan",
            Relation::TripDate => "tripDate",
            Relation::TripOzone => "tripOzone",
            Relation::TripDzone => "tripDzone",
            Relation::TripType => "TripType",
        }
    }

    /// (head type, tail type)
    pub fn signature(self) -> (EntityType, EntityType) {
        use EntityType::*;
        match self {
            Relation::HasTrip => (Vehicle, Trip),
            Relation::TripWeek => (Trip, Week),
            Relation::TripTimeSpan => (Trip, TimeSpan),
            Relation::TripDate => (Trip, Date),
            Relation::TripOzone => (Trip, Zone),
            Relation::TripDzone => (Trip, Zone),
            Relation::TripType => (Vehicle, Label),
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Relation::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown relation `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityRef {
    pub etype: EntityType,
    pub key: String,
}

impl EntityRef {
    pub fn new(etype: EntityType, key: impl Into<String>) -> Self {
        EntityRef { etype, key: key.into() }
    }
}

impl fmt::Display for EntityRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", self.etype, self.key)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(u32);

impl EntityId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Everything needed to insert one trip.
#[derive(Debug, Clone)]
pub struct NewTrip<'a> {
    pub key: &'a str,
    pub vehicle: &'a str,
    pub date: &'a str,
    pub week: &'a str,
    pub span: &'a str,
    pub origin: &'a str,
    pub dest: &'a str,
    pub ftime: TimeOfDay,
}

/// A trip resolved through its attribute edges.
#[derive(Debug, Clone, Copy)]
pub struct TripView<'a> {
    pub id: EntityId,
    pub key: &'a str,
    pub vehicle: &'a str,
    pub date: &'a str,
    pub week: &'a str,
    pub span: &'a str,
    pub origin: &'a str,
    pub dest: &'a str,
    pub ftime: TimeOfDay,
}

impl TripView<'_> {
    /// Intra-day sequence number encoded in the trip key.
    pub fn seq(&self) -> u64 {
        self.key.rsplit('#').next().and_then(|s| s.parse().ok()).unwrap_or(0)
    }
}

pub fn trip_key(vehicle: &str, date: &str, seq: usize) -> String {
    format!("{vehicle}#{date}#{seq}")
}

#[derive(Debug, Clone, Default)]
pub struct TripKG {
    entities: Vec<EntityRef>,
    by_type: [Vec<EntityId>; 7],
    index: [HashMap<String, EntityId>; 7],
    forward: HashMap<(EntityId, Relation), Vec<EntityId>>,
    reverse: HashMap<(EntityId, Relation), Vec<EntityId>>,
    ftime: HashMap<EntityId, TimeOfDay>,
    triple_counts: [usize; 7],
}

impl TripKG {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn entity_count(&self, etype: EntityType) -> usize {
        self.by_type[etype.slot()].len()
    }

    pub fn total_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn triple_count(&self, rel: Relation) -> usize {
        self.triple_counts[rel.slot()]
    }

    pub fn total_triples(&self) -> usize {
        self.triple_counts.iter().sum()
    }

    pub fn id(&self, etype: EntityType, key: &str) -> Option<EntityId> {
        self.index[etype.slot()].get(key).copied()
    }

    pub fn entity(&self, id: EntityId) -> &EntityRef {
        &self.entities[id.index()]
    }

    pub fn get_entity(&self, etype: EntityType, key: &str) -> Option<&EntityRef> {
        self.id(etype, key).map(|id| self.entity(id))
    }

    pub fn entities_of(&self, etype: EntityType) -> impl Iterator<Item = &EntityRef> + '_ {
        self.by_type[etype.slot()].iter().map(|&id| self.entity(id))
    }

    pub fn ids_of(&self, etype: EntityType) -> &[EntityId] {
        &self.by_type[etype.slot()]
    }

    pub fn keys_of(&self, etype: EntityType) -> impl Iterator<Item = &str> + '_ {
        self.entities_of(etype).map(|e| e.key.as_str())
    }

    pub fn neighbor_ids(&self, id: EntityId, rel: Relation, dir: Direction) -> &[EntityId] {
        let map = match dir {
            Direction::Forward => &self.forward,
            Direction::Reverse => &self.reverse,
        };
        map.get(&(id, rel)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Adjacent entities under one relation, in insertion order.
    pub fn neighbors(&self, entity: &EntityRef, rel: Relation, dir: Direction) -> Result<Vec<&EntityRef>> {
        let id = self.id(entity.etype, &entity.key).ok_or_else(|| Error::UnknownEntity {
            etype: entity.etype,
            key: entity.key.clone(),
        })?;
        Ok(self.neighbor_ids(id, rel, dir).iter().map(|&n| self.entity(n)).collect())
    }

    fn single(&self, id: EntityId, rel: Relation) -> Option<&str> {
        match self.neighbor_ids(id, rel, Direction::Forward) {
            [one] => Some(self.entity(*one).key.as_str()),
            _ => None,
        }
    }

    pub fn ftime(&self, trip: EntityId) -> Option<TimeOfDay> {
        self.ftime.get(&trip).copied()
    }

    pub(crate) fn ensure_entity(&mut self, etype: EntityType, key: &str) -> EntityId {
        if let Some(id) = self.id(etype, key) {
            return id;
        }
        let id = EntityId(u32::try_from(self.entities.len()).expect("entity count fits in u32"));
        self.entities.push(EntityRef::new(etype, key));
        self.by_type[etype.slot()].push(id);
        self.index[etype.slot()].insert(key.to_string(), id);
        id
    }

    fn link(&mut self, head: EntityId, rel: Relation, tail: EntityId) {
        self.forward.entry((head, rel)).or_default().push(tail);
        self.reverse.entry((tail, rel)).or_default().push(head);
        self.triple_counts[rel.slot()] += 1;
    }

    fn unlink(&mut self, head: EntityId, rel: Relation, tail: EntityId) {
        let mut removed = false;
        if let Some(v) = self.forward.get_mut(&(head, rel)) {
            if let Some(pos) = v.iter().position(|&t| t == tail) {
                v.remove(pos);
                removed = true;
            }
        }
        if let Some(v) = self.reverse.get_mut(&(tail, rel)) {
            if let Some(pos) = v.iter().position(|&h| h == head) {
                v.remove(pos);
            }
        }
        if removed {
            self.triple_counts[rel.slot()] -= 1;
        }
    }

    /// Adds a triple after checking the relation's type signature.
    pub fn add_triple(&mut self, head: &EntityRef, rel: Relation, tail: &EntityRef) -> Result<()> {
        if rel.signature() != (head.etype, tail.etype) {
            return Err(Error::Schema(format!("{head} -[{rel}]-> {tail} violates the relation signature")));
        }
        let h = self.ensure_entity(head.etype, &head.key);
        let t = self.ensure_entity(tail.etype, &tail.key);
        self.link(h, rel, t);
        Ok(())
    }

    pub fn add_trip(&mut self, trip: &NewTrip<'_>) -> Result<EntityId> {
        if self.id(EntityType::Trip, trip.key).is_some() {
            return Err(Error::Schema(format!("trip key `{}` already in use", trip.key)));
        }
        let vehicle = self.ensure_entity(EntityType::Vehicle, trip.vehicle);
        let id = self.ensure_entity(EntityType::Trip, trip.key);
        self.link(vehicle, Relation::HasTrip, id);
        let attrs = [
            (Relation::TripWeek, EntityType::Week, trip.week),
            (Relation::TripTimeSpan, EntityType::TimeSpan, trip.span),
            (Relation::TripDate, EntityType::Date, trip.date),
            (Relation::TripOzone, EntityType::Zone, trip.origin),
            (Relation::TripDzone, EntityType::Zone, trip.dest),
        ];
        for (rel, etype, key) in attrs {
            let tail = self.ensure_entity(etype, key);
            self.link(id, rel, tail);
        }
        self.ftime.insert(id, trip.ftime);
        Ok(id)
    }

    pub(crate) fn set_ftime(&mut self, trip: EntityId, t: TimeOfDay) {
        self.ftime.insert(trip, t);
    }

    pub fn trip_view(&self, id: EntityId) -> TripView<'_> {
        let vehicle = self
            .neighbor_ids(id, Relation::HasTrip, Direction::Reverse)
            .first()
            .map(|&v| self.entity(v).key.as_str())
            .unwrap_or("");
        TripView {
            id,
            key: &self.entity(id).key,
            vehicle,
            date: self.single(id, Relation::TripDate).unwrap_or(""),
            week: self.single(id, Relation::TripWeek).unwrap_or(""),
            span: self.single(id, Relation::TripTimeSpan).unwrap_or(""),
            origin: self.single(id, Relation::TripOzone).unwrap_or(""),
            dest: self.single(id, Relation::TripDzone).unwrap_or(""),
            ftime: self.ftime(id).unwrap_or_default(),
        }
    }

    /// All trips in insertion order.
    pub fn trips(&self) -> impl Iterator<Item = TripView<'_>> + '_ {
        self.ids_of(EntityType::Trip).iter().map(|&id| self.trip_view(id))
    }

    /// Trips of one vehicle ordered by (date, ftime, intra-day sequence).
    pub fn vehicle_trips(&self, vehicle: &str) -> Result<Vec<TripView<'_>>> {
        let v = self.id(EntityType::Vehicle, vehicle).ok_or_else(|| Error::UnknownEntity {
            etype: EntityType::Vehicle,
            key: vehicle.to_string(),
        })?;
        let mut trips: Vec<_> =
            self.neighbor_ids(v, Relation::HasTrip, Direction::Forward).iter().map(|&t| self.trip_view(t)).collect();
        trips.sort_by(|a, b| (a.date, a.ftime, a.seq()).cmp(&(b.date, b.ftime, b.seq())));
        Ok(trips)
    }

    /// Distinct trip dates, ascending.
    pub fn dates(&self) -> Vec<String> {
        let mut dates: Vec<String> = self
            .ids_of(EntityType::Date)
            .iter()
            .filter(|&&d| !self.neighbor_ids(d, Relation::TripDate, Direction::Reverse).is_empty())
            .map(|&d| self.entity(d).key.clone())
            .collect();
        dates.sort();
        dates
    }

    pub fn label_of(&self, vehicle: &str) -> Option<&str> {
        let v = self.id(EntityType::Vehicle, vehicle)?;
        self.single(v, Relation::TripType)
    }

    pub fn has_labels(&self) -> bool {
        self.triple_count(Relation::TripType) > 0
    }

    /// Attaches one label per listed vehicle, replacing any previous label.
    /// Fails without modifying the graph if a vehicle is unknown.
    pub fn attach_labels(&mut self, labels: &BTreeMap<String, String>) -> Result<()> {
        if let Some(missing) = labels.keys().find(|v| self.id(EntityType::Vehicle, v).is_none()) {
            return Err(Error::UnknownEntity { etype: EntityType::Vehicle, key: missing.clone() });
        }
        let vehicles: Vec<EntityId> = self.ids_of(EntityType::Vehicle).to_vec();
        for v in vehicles {
            let Some(label) = labels.get(&self.entity(v).key) else { continue };
            let previous: Vec<EntityId> = self.neighbor_ids(v, Relation::TripType, Direction::Forward).to_vec();
            for old in previous {
                self.unlink(v, Relation::TripType, old);
            }
            let l = self.ensure_entity(EntityType::Label, label);
            self.link(v, Relation::TripType, l);
        }
        Ok(())
    }

    /// Copies the vehicles accepted by `keep_vehicle` together with their
    /// accepted trips. Vehicles left without trips are dropped unless
    /// `keep_empty` is set.
    fn induced<'a>(
        &'a self,
        keep_vehicle: impl Fn(&str) -> bool,
        keep_trip: impl Fn(&TripView<'a>) -> bool,
        keep_empty: bool,
    ) -> TripKG {
        let mut sub = TripKG::new();
        for &v in self.ids_of(EntityType::Vehicle) {
            let vkey = &self.entity(v).key;
            if !keep_vehicle(vkey) {
                continue;
            }
            let trips: Vec<TripView<'_>> = self
                .neighbor_ids(v, Relation::HasTrip, Direction::Forward)
                .iter()
                .map(|&t| self.trip_view(t))
                .filter(|t| keep_trip(t))
                .collect();
            if trips.is_empty() && !keep_empty {
                continue;
            }
            let nv = sub.ensure_entity(EntityType::Vehicle, vkey);
            for t in &trips {
                sub.add_trip(&NewTrip {
                    key: t.key,
                    vehicle: t.vehicle,
                    date: t.date,
                    week: t.week,
                    span: t.span,
                    origin: t.origin,
                    dest: t.dest,
                    ftime: t.ftime,
                })
                .expect("keys are unique in the source graph");
            }
            for &l in self.neighbor_ids(v, Relation::TripType, Direction::Forward) {
                let nl = sub.ensure_entity(EntityType::Label, &self.entity(l).key);
                sub.link(nv, Relation::TripType, nl);
            }
        }
        sub
    }

    /// Vehicles carrying `label`, their trips and every triple incident to
    /// those trips.
    pub fn label_subgraph(&self, label: &str) -> Result<TripKG> {
        if !self.has_labels() {
            return Err(Error::LabelsNotAttached);
        }
        Ok(self.induced(|v| self.label_of(v) == Some(label), |_| true, true))
    }

    /// Trips on `date` with their vehicles (and the vehicles' labels).
    pub fn date_subgraph(&self, date: &str) -> TripKG {
        self.induced(|_| true, |t| t.date == date, false)
    }

    pub fn label_names(&self) -> BTreeSet<String> {
        self.ids_of(EntityType::Label)
            .iter()
            .filter(|&&l| !self.neighbor_ids(l, Relation::TripType, Direction::Reverse).is_empty())
            .map(|&l| self.entity(l).key.clone())
            .collect()
    }

    /// Checks relation signatures, trip completeness and label cardinality.
    pub fn check_schema(&self) -> Result<()> {
        for ((head, rel), tails) in &self.forward {
            let (ht, tt) = rel.signature();
            if self.entity(*head).etype != ht || tails.iter().any(|t| self.entity(*t).etype != tt) {
                return Err(Error::Schema(format!("{} has a `{rel}` edge with the wrong signature", self.entity(*head))));
            }
        }
        for &t in self.ids_of(EntityType::Trip) {
            let e = self.entity(t);
            if self.neighbor_ids(t, Relation::HasTrip, Direction::Reverse).len() != 1 {
                return Err(Error::Schema(format!("{e} must have exactly one incoming hastrip")));
            }
            for rel in Relation::TRIP_ATTRIBUTES {
                if self.neighbor_ids(t, rel, Direction::Forward).len() != 1 {
                    return Err(Error::Schema(format!("{e} must have exactly one `{rel}` edge")));
                }
            }
            if self.ftime(t).is_none() {
                return Err(Error::Schema(format!("{e} has no ftime property")));
            }
        }
        for &v in self.ids_of(EntityType::Vehicle) {
            if self.neighbor_ids(v, Relation::TripType, Direction::Forward).len() > 1 {
                return Err(Error::Schema(format!("{} has more than one label", self.entity(v))));
            }
        }
        for w in self.keys_of(EntityType::Week) {
            if w != "workday" && w != "holiday" {
                return Err(Error::Schema(format!("unknown week value `{w}`")));
            }
        }
        Ok(())
    }

    /// Per-entity adjacency as sorted key lists, for structural comparison.
    pub fn adjacency_signature(&self) -> BTreeMap<(EntityRef, Relation, bool), Vec<EntityRef>> {
        let mut out = BTreeMap::new();
        for (map, fwd) in [(&self.forward, true), (&self.reverse, false)] {
            for ((id, rel), ns) in map {
                if ns.is_empty() {
                    continue;
                }
                let mut keys: Vec<EntityRef> = ns.iter().map(|&n| self.entity(n).clone()).collect();
                keys.sort();
                out.insert((self.entity(*id).clone(), *rel, fwd), keys);
            }
        }
        out
    }
}

/// Builds the graph from validated records. Trips are inserted grouped by
/// vehicle and ordered by (date, ftime, input position) within a vehicle; the
/// sequence number in each trip key counts trips within (vehicle, date).
pub fn build_graph(records: &[TripRecord], cal: &CalendarConfig, spans: &TimeSpanConfig) -> TripKG {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&records[a], &records[b]);
        (&ra.vehicle, ra.date, ra.ftime, a).cmp(&(&rb.vehicle, rb.date, rb.ftime, b))
    });

    let mut g = TripKG::new();
    let mut seq = 0usize;
    let mut prev: Option<(&str, chrono::NaiveDate)> = None;
    for i in order {
        let r = &records[i];
        let day = (r.vehicle.as_str(), r.date);
        seq = if prev == Some(day) { seq + 1 } else { 0 };
        prev = Some(day);
        let date = r.date_key();
        let key = trip_key(&r.vehicle, &date, seq);
        g.add_trip(&NewTrip {
            key: &key,
            vehicle: &r.vehicle,
            date: &date,
            week: cal.map_week(r.date).as_str(),
            span: spans.map_timespan(r.ftime),
            origin: &r.fzone,
            dest: &r.tzone,
            ftime: r.ftime,
        })
        .expect("generated trip keys are unique");
    }
    g
}
