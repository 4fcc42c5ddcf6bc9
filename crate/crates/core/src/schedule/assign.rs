use serde::{Deserialize, Serialize};

use super::expander::expander_template;
use super::realize::realize;
use super::symmetric::{class_distances, symmetric_template};
use super::{Schedule, Stage, Strategy};
use crate::error::{Error, Result};
use crate::topology::{translation_offsets, DistanceTable, TopologySequence, UNREACHABLE};
use crate::traffic::TrafficMatrix;

/// Which per-topology scheduler `assign_template` may use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum TemplateScheduler {
    /// Class-level symmetric packing whenever the topology's layers are
    /// translations and its assigned flows form whole classes; per-flow
    /// packing otherwise.
    #[default]
    Auto,
    Expander,
}

enum Distances {
    Classes(Vec<u32>),
    Table(DistanceTable),
}

impl Distances {
    fn get(&self, n: usize, src: usize, dst: usize) -> u32 {
        match self {
            Distances::Classes(d) => d[(dst + n - src) % n],
            Distances::Table(t) => t.raw(src, dst),
        }
    }
}

/// Unit-demand strategy over every ordered pair: each pair goes to the
/// topology where it is closest (earliest on ties) and each topology then
/// schedules only its own pairs.
pub fn assign_template(seq: &TopologySequence, scheduler: TemplateScheduler) -> Result<Strategy> {
    let first = seq.topologies.first().ok_or_else(|| Error::InvalidTopology("empty sequence".into()))?;
    let (n, k) = (first.n(), first.k());
    let offsets: Vec<Option<Vec<usize>>> = seq.topologies.iter().map(translation_offsets).collect();
    let dists: Vec<Distances> = seq
        .topologies
        .iter()
        .zip(&offsets)
        .map(|(t, o)| match o {
            Some(o) => Distances::Classes(class_distances(n, o)),
            None => Distances::Table(DistanceTable::new(t)),
        })
        .collect();

    let mut assigned: Vec<Vec<(usize, usize)>> = vec![Vec::new(); seq.len()];
    for src in 0..n {
        for dst in (0..n).filter(|&d| d != src) {
            let (best, h) = dists
                .iter()
                .enumerate()
                .map(|(i, d)| (i, d.get(n, src, dst)))
                .min_by_key(|&(i, h)| (h, i))
                .expect("nonempty sequence");
            if h == UNREACHABLE {
                return Err(Error::Unserved { src, dst });
            }
            assigned[best].push((src, dst));
        }
    }

    let mut stages = Vec::with_capacity(seq.len());
    for (i, topo) in seq.topologies.iter().enumerate() {
        let pairs = &assigned[i];
        let schedule = if pairs.is_empty() {
            Schedule::default()
        } else {
            let classes = whole_classes(n, pairs);
            match (&offsets[i], classes, scheduler) {
                (Some(_), Some(classes), TemplateScheduler::Auto) => symmetric_template(topo, Some(&classes))?,
                _ => {
                    let table = match &dists[i] {
                        Distances::Table(t) => t.clone(),
                        Distances::Classes(_) => DistanceTable::new(topo),
                    };
                    expander_template(topo, &table, pairs)?
                }
            }
        };
        stages.push(Stage { topology: topo.clone(), schedule });
    }
    Ok(Strategy { n, k, stages, provenance: Default::default() })
}

/// The classes `t` when `pairs` is exactly a union of `{(u, u+t)}` classes.
fn whole_classes(n: usize, pairs: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut count = vec![0usize; n];
    for &(s, d) in pairs {
        count[(d + n - s) % n] += 1;
    }
    let classes: Vec<usize> = (1..n).filter(|&t| count[t] > 0).collect();
    classes.iter().all(|&t| count[t] == n).then_some(classes)
}

/// Serves `a` on the sequence with the assignment template.
pub fn cross_topology_assign(seq: &TopologySequence, a: &TrafficMatrix) -> Result<Strategy> {
    let template = assign_template(seq, TemplateScheduler::Auto)?;
    if a.n() != template.n {
        return Err(Error::InvalidTraffic(format!("matrix is {}x{}, sequence has n={}", a.n(), a.n(), template.n)));
    }
    Ok(realize(&template, a))
}
