//! Built-in sweeps at desk scale (60 epochs, 20 seeds, n = 25 unless varied).

use std::path::PathBuf;

use spanfl_core::{GraphFamily, Strategy};

use crate::config::{FailureSetting, ExperimentSpec};

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> ExperimentSpec,
}

impl Preset {
    pub fn spec(&self) -> ExperimentSpec {
        let mut s = (self.build)();
        s.name = self.name.to_string();
        s.output_dir = PathBuf::from("results").join(self.name);
        s
    }
}

fn base(graphs: Vec<GraphFamily>) -> ExperimentSpec {
    let mut s: ExperimentSpec = toml::from_str("graphs = []\nstrategies = []").expect("defaults parse");
    s.graphs = graphs;
    s.strategies = Strategy::ALL.to_vec();
    s
}

const DG: GraphFamily = GraphFamily::DirectedGeometric { r: 0.2 };

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "connectivity-dg",
        description: "directed geometric graphs, r in {0.2, 0.4, 0.6}",
        build: || base([0.2, 0.4, 0.6].map(|r| GraphFamily::DirectedGeometric { r }).to_vec()),
    },
    Preset {
        name: "connectivity-er",
        description: "Erdos-Renyi graphs, p in {0.1, 0.3, 0.5}",
        build: || base([0.1, 0.3, 0.5].map(|p| GraphFamily::ErdosRenyi { p }).to_vec()),
    },
    Preset {
        name: "connectivity-pa",
        description: "preferential attachment graphs, m0 in {1, 2, 6}",
        build: || base([1, 2, 6].map(|m0| GraphFamily::PreferentialAttachment { m0 }).to_vec()),
    },
    Preset {
        name: "network-size",
        description: "n in {10, 25} on DG(r = 0.4)",
        build: || {
            let mut s = base(vec![GraphFamily::DirectedGeometric { r: 0.4 }]);
            s.n = vec![10, 25];
            s
        },
    },
    Preset {
        name: "adversary-percentage",
        description: "10% and 20% adversaries on DG(r = 0.2)",
        build: || {
            let mut s = base(vec![DG]);
            s.adversary_fraction = vec![0.1, 0.2];
            s
        },
    },
    Preset {
        name: "failure-dynamics",
        description: "low, mild, moderate and high node/link failure on DG(r = 0.2)",
        build: || {
            let mut s = base(vec![DG]);
            s.failures = FailureSetting::TABLE.to_vec();
            s
        },
    },
    Preset {
        name: "attack-timing",
        description: "attack epoch in {5, 15, 30}, IID and 3 classes per node, on DG(r = 0.2)",
        build: || {
            let mut s = base(vec![DG]);
            s.attack_epoch = vec![5, 15, 30];
            s.classes_per_node = vec![10, 3];
            s
        },
    },
    Preset {
        name: "attack-power",
        description: "epsilon in {50, 100, 250, 500, 1000} x eps_scale on DG(r = 0.2)",
        build: || {
            let mut s = base(vec![DG]);
            s.epsilon = vec![50.0, 100.0, 250.0, 500.0, 1000.0];
            s
        },
    },
    Preset {
        name: "data-distribution",
        description: "classes per node in {1, 3, 5, 7, 10} on DG(r = 0.2)",
        build: || {
            let mut s = base(vec![DG]);
            s.classes_per_node = vec![1, 3, 5, 7, 10];
            s
        },
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
