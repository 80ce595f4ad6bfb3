mod common;

use common::oracle::oracle_graph;
use mlcoh::gen::Generator;
use mlcoh::{graph_of, SystemId};

#[test]
fn oracle_agrees_with_graph_of() {
    for sys in SystemId::ALL {
        for seed in 0..300 {
            let f = Generator::new(sys, seed).with_max_size(10).arrow(10);
            let g = graph_of(&f).unwrap();
            let (links, loops) = oracle_graph(&f);
            assert_eq!(links, g.links(), "{sys} seed {seed}: {f}");
            assert_eq!(loops, g.loops, "{sys} seed {seed}: {f}");
        }
    }
}
