// SPDX-License-Identifier: Apache-2.0

//! Seeded random instances. Distributions live in `data/instance_defaults.json`.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::floorplan::{ArrangementSpec, Axis, ModuleKind, ModuleSpec};
use crate::interconnect::RcTree;
use crate::netlist::CircuitGraph;
use crate::sizing::{GateParams, SizingParams};

pub const DEFAULTS_JSON: &str = include_str!("../data/instance_defaults.json");

#[derive(Clone, Copy, Debug, Deserialize)]
pub struct Range(pub f64, pub f64);

impl Range {
    fn sample(self, rng: &mut ChaCha8Rng) -> f64 {
        if self.0 == self.1 {
            return self.0;
        }
        rng.gen_range(self.0.ln()..self.1.ln()).exp()
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct SizingRanges {
    pub r: Range,
    pub c_in: Range,
    pub c_int: Range,
    pub vol: Range,
    pub leak: Range,
    pub freq: Range,
    pub c_po: Range,
}

#[derive(Clone, Debug, Deserialize)]
pub struct InterconnectRanges {
    pub alpha: Range,
    pub beta: Range,
    pub gamma: Range,
    pub c_load: Range,
    pub r0: Range,
    pub lmin: Range,
    pub lmax_factor: f64,
    pub wmin: f64,
    pub wmax: f64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct FourModuleRanges {
    pub face: Range,
    pub thickness: Range,
    pub power: Range,
    pub conductivity: Range,
    pub zmax_factor: f64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct RandomFloorplanRanges {
    pub dim: Range,
    pub power: Range,
    pub conductivity: Range,
    pub heat_removal_fraction: f64,
    pub lattice: [usize; 3],
    pub zmax_factor: f64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct InstanceDefaults {
    pub version: u32,
    pub sizing: SizingRanges,
    pub interconnect: InterconnectRanges,
    pub floorplan_four: FourModuleRanges,
    pub floorplan_random: RandomFloorplanRanges,
}

pub fn defaults() -> &'static InstanceDefaults {
    static D: OnceLock<InstanceDefaults> = OnceLock::new();
    D.get_or_init(|| serde_json::from_str(DEFAULTS_JSON).expect("bundled defaults parse"))
}

/// Stream ids keep instance kinds independent under a shared seed.
#[derive(Clone, Copy)]
enum Stream {
    Sizing = 1,
    Interconnect = 2,
    FourModule = 3,
    RandomFloorplan = 4,
}

fn rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream as u64);
    r
}

/// Every node drawn in id order.
pub fn sizing_params(g: &CircuitGraph, seed: u64) -> SizingParams {
    let d = &defaults().sizing;
    let mut rng = rng(seed, Stream::Sizing);
    let mut p = SizingParams::empty();
    for i in 0..g.len() {
        let name = g.name(i).to_string();
        if g.is_cb(i) {
            p.gates.insert(
                name.clone(),
                GateParams {
                    r: d.r.sample(&mut rng),
                    c_in: d.c_in.sample(&mut rng),
                    c_int: d.c_int.sample(&mut rng),
                    vol: d.vol.sample(&mut rng),
                    leak: d.leak.sample(&mut rng),
                },
            );
        }
        if g.is_po(i) {
            p.po_cap.insert(name, d.c_po.sample(&mut rng));
        } else {
            p.freq.insert(name, d.freq.sample(&mut rng));
        }
    }
    p
}

/// Segment parents of the five-segment tree with leaves 3, 4 and 5.
pub const BRANCHING_PARENTS: [(&str, Option<&str>); 5] =
    [("1", None), ("2", Some("1")), ("3", Some("2")), ("4", Some("2")), ("5", Some("1"))];

pub fn rc_tree(parents: &[(&str, Option<&str>)], seed: u64) -> RcTree {
    let d = &defaults().interconnect;
    let mut rng = rng(seed, Stream::Interconnect);
    let rows = parents
        .iter()
        .map(|&(id, parent)| {
            let lmin = d.lmin.sample(&mut rng);
            let v = [
                d.alpha.sample(&mut rng),
                d.beta.sample(&mut rng),
                d.gamma.sample(&mut rng),
                d.c_load.sample(&mut rng),
                d.wmin,
                d.wmax,
                lmin,
                lmin * d.lmax_factor,
            ];
            (id.to_string(), parent.map(str::to_string), v)
        })
        .collect();
    let r0 = d.r0.sample(&mut rng);
    RcTree::new(rows, Some(r0)).expect("generated tree is valid")
}

pub fn branching_tree(seed: u64) -> RcTree {
    rc_tree(&BRANCHING_PARENTS, seed)
}

/// Four plate-shaped modules: 1–3 stacked along Z, 4 standing beside them along X.
/// Returns the modules with the stacked arrangement and the coplanar one,
/// where 1–3 lie side by side along Y instead.
pub fn four_module(seed: u64) -> (Vec<ModuleSpec>, ArrangementSpec, ArrangementSpec) {
    let d = &defaults().floorplan_four;
    let mut rng = rng(seed, Stream::FourModule);
    let mods: Vec<ModuleSpec> = (1..=4)
        .map(|i| {
            let orientation = if i == 4 { Axis::X } else { Axis::Z };
            let mut min = [0.0; 3];
            for a in Axis::ALL {
                min[a as usize] = if a == orientation {
                    d.thickness.sample(&mut rng)
                } else {
                    d.face.sample(&mut rng)
                };
            }
            ModuleSpec {
                id: i.to_string(),
                kind: ModuleKind::CircuitElement {
                    power: d.power.sample(&mut rng),
                    conductivity: d.conductivity.sample(&mut rng),
                },
                min,
                orientation,
            }
        })
        .collect();
    let ids = |v: &[&[u32]]| -> Vec<Vec<String>> {
        v.iter().map(|c| c.iter().map(u32::to_string).collect()).collect()
    };
    let z_stack = (mods[0].min[2] + mods[1].min[2] + mods[2].min[2]).max(mods[3].min[2]);
    let zmax = d.zmax_factor * z_stack;
    let stacked = ArrangementSpec {
        chains: [
            (Axis::X, ids(&[&[1, 4], &[2, 4], &[3, 4]])),
            (Axis::Y, ids(&[&[1], &[2], &[3], &[4]])),
            (Axis::Z, ids(&[&[1, 2, 3], &[4]])),
        ]
        .into(),
        zmax,
    };
    let coplanar = ArrangementSpec {
        chains: [
            (Axis::X, ids(&[&[1, 4], &[2, 4], &[3, 4]])),
            (Axis::Y, ids(&[&[1, 2, 3], &[4]])),
            (Axis::Z, ids(&[&[1], &[2], &[3], &[4]])),
        ]
        .into(),
        zmax,
    };
    (mods, stacked, coplanar)
}

/// Modules on a full lattice; each lattice row along an axis is one chain.
pub fn random_floorplan(seed: u64) -> (Vec<ModuleSpec>, ArrangementSpec) {
    let d = &defaults().floorplan_random;
    let mut rng = rng(seed, Stream::RandomFloorplan);
    let [nx, ny, nz] = d.lattice;
    let at = |i: usize, j: usize, k: usize| format!("m{}", (k * ny + j) * nx + i);
    let mut mods = Vec::with_capacity(nx * ny * nz);
    for n in 0..nx * ny * nz {
        let min = [0; 3].map(|_| d.dim.sample(&mut rng));
        let orientation = Axis::ALL[rng.gen_range(0..3)];
        let kind = if rng.gen_bool(d.heat_removal_fraction) {
            ModuleKind::HeatRemoval
        } else {
            ModuleKind::CircuitElement {
                power: d.power.sample(&mut rng),
                conductivity: d.conductivity.sample(&mut rng),
            }
        };
        mods.push(ModuleSpec {
            id: format!("m{n}"),
            kind,
            min,
            orientation,
        });
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut z = Vec::new();
    for k in 0..nz {
        for j in 0..ny {
            x.push((0..nx).map(|i| at(i, j, k)).collect());
        }
        for i in 0..nx {
            y.push((0..ny).map(|j| at(i, j, k)).collect());
        }
    }
    for j in 0..ny {
        for i in 0..nx {
            z.push((0..nz).map(|k| at(i, j, k)).collect::<Vec<_>>());
        }
    }
    let z_need = z
        .iter()
        .map(|c| c.iter().map(|id| mods[id[1..].parse::<usize>().unwrap()].min[2]).sum::<f64>())
        .fold(0.0, f64::max);
    let arr = ArrangementSpec {
        chains: [(Axis::X, x), (Axis::Y, y), (Axis::Z, z)].into(),
        zmax: d.zmax_factor * z_need,
    };
    (mods, arr)
}
