use netotc::generators::{
    gen_lollipop, gen_random_weighted_adjacency, gen_sbm, permuted_copy, random_strongly_connected, GeneratorSpec,
    WithinProbability,
};
use netotc::{Label, Network};

fn upper_pairs(g: &Network) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..g.n()).flat_map(move |u| (u + 1..g.n()).map(move |v| (u, v)))
}

fn unweighted_degree(g: &Network, u: usize) -> usize {
    g.out_neighbors(u).filter(|&v| v != u).count()
}

#[test]
fn erdos_renyi_extremes() {
    let full = GeneratorSpec::erdos_renyi((6, 6), 1.0).generate(1).unwrap();
    assert!(upper_pairs(&full).all(|(u, v)| full.weight(u, v) == 1.0));
    let empty = GeneratorSpec::erdos_renyi((6, 6), 0.0).generate(1).unwrap();
    assert_eq!(empty.edge_count(), 0);
    assert!(!empty.is_strongly_connected());
}

#[test]
fn erdos_renyi_density() {
    let spec = GeneratorSpec::erdos_renyi((10, 10), 1.0 / 3.0);
    let (mut edges, mut pairs) = (0usize, 0usize);
    for seed in 0..1000 {
        let g = spec.generate(seed).unwrap();
        edges += upper_pairs(&g).filter(|&(u, v)| g.has_edge(u, v)).count();
        pairs += g.n() * (g.n() - 1) / 2;
        assert!((0..g.n()).all(|u| !g.has_edge(u, u)));
    }
    let density = edges as f64 / pairs as f64;
    assert!((density - 1.0 / 3.0).abs() < 0.02, "density {density}");
}

#[test]
fn sbm_blocks_and_densities() {
    let (cliques, labels) = gen_sbm(&[3, 4], WithinProbability::Scalar(1.0), 0.0, 2).unwrap();
    for (u, v) in upper_pairs(&cliques) {
        assert_eq!(cliques.has_edge(u, v), labels[u] == labels[v]);
    }

    let (g, labels) = gen_sbm(&[7, 7, 7, 7], WithinProbability::Scalar(0.7), 0.1, 3).unwrap();
    assert_eq!(g.n(), 28);
    let mut blocks = labels.clone();
    blocks.dedup();
    assert_eq!(blocks, vec![0, 1, 2, 3]);
    let attached = g.attributes().labels.as_ref().unwrap();
    assert!(attached.iter().zip(&labels).all(|(a, &b)| *a == Label::Int(b as i64)));

    let (mut within, mut within_pairs, mut between, mut between_pairs) = (0, 0, 0, 0);
    for seed in 0..500 {
        let (g, labels) = gen_sbm(&[7, 7, 7], WithinProbability::Scalar(0.7), 0.1, seed).unwrap();
        for (u, v) in upper_pairs(&g) {
            let e = g.has_edge(u, v) as usize;
            if labels[u] == labels[v] {
                within += e;
                within_pairs += 1;
            } else {
                between += e;
                between_pairs += 1;
            }
        }
    }
    let pw = within as f64 / within_pairs as f64;
    let pb = between as f64 / between_pairs as f64;
    assert!((pw - 0.7).abs() < 0.05, "within {pw}");
    assert!((pb - 0.1).abs() < 0.05, "between {pb}");
}

#[test]
fn lollipop_shape() {
    let g = gen_lollipop((7, 7), (7, 7), 0.0, 4).unwrap();
    assert_eq!(g.n(), 14);
    assert_eq!(upper_pairs(&g).filter(|&(u, v)| g.has_edge(u, v)).count(), 14);
    for seed in 0..300 {
        let g = GeneratorSpec::lollipop().generate(seed).unwrap();
        assert!(g.is_strongly_connected());
    }
    for k in [0, 1, 5, 9] {
        let g = gen_lollipop((8, 8), (k, k), 0.5, 7).unwrap();
        assert_eq!(g.n(), 8 + k);
        let stick: Vec<usize> = (8..8 + k).collect();
        assert!(stick.iter().all(|&u| unweighted_degree(&g, u) <= 2));
        if k > 0 {
            assert_eq!(unweighted_degree(&g, 8 + k - 1), 1);
            assert!(g.has_edge(0, 8));
        }
    }
}

#[test]
fn weighted_adjacency_alphabet() {
    let full = gen_random_weighted_adjacency((6, 6), &[1], 0).unwrap();
    assert!((0..6).all(|u| (0..6).all(|v| full.weight(u, v) == 1.0)));
    let empty = gen_random_weighted_adjacency((6, 6), &[0], 0).unwrap();
    assert_eq!(empty.edge_count(), 0);

    let mut counts = [0usize; 3];
    let mut seed = 0;
    let mut total = 0;
    while total < 100_000 {
        let g = gen_random_weighted_adjacency((6, 20), &[0, 1, 2], seed).unwrap();
        assert!((6..=20).contains(&g.n()));
        assert_eq!(g.weights(), &g.weights().transpose());
        for u in 0..g.n() {
            for v in u..g.n() {
                counts[g.weight(u, v) as usize] += 1;
                total += 1;
            }
        }
        seed += 1;
    }
    for c in counts {
        let share = c as f64 / total as f64;
        assert!((share - 1.0 / 3.0).abs() < 0.03, "{counts:?}");
    }
}

#[test]
fn permuted_copies_are_isomorphic() {
    let g = GeneratorSpec::lollipop().generate(1).unwrap();
    let same = g.permuted(&(0..g.n()).collect::<Vec<_>>()).unwrap();
    assert_eq!(same.weights(), g.weights());
    for seed in 0..50 {
        let g = random_strongly_connected(9, seed % 2 == 0, 0.3, seed).unwrap();
        let (h, phi) = permuted_copy(&g, seed).unwrap();
        for u in 0..9 {
            for v in 0..9 {
                assert_eq!(h.weight(phi[u], phi[v]), g.weight(u, v));
            }
        }
        let mut d1 = g.degrees();
        let mut d2 = h.degrees();
        d1.sort_by(f64::total_cmp);
        d2.sort_by(f64::total_cmp);
        assert!(d1.iter().zip(&d2).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}

#[test]
fn generators_are_deterministic() {
    let specs = [
        GeneratorSpec::erdos_renyi((10, 15), 0.3),
        GeneratorSpec::sbm(vec![5, 6], 0.7, 0.1),
        GeneratorSpec::lollipop(),
        GeneratorSpec::random_weighted_adjacency(vec![0, 1, 2]),
    ];
    for spec in &specs {
        for seed in [0, 1, u64::MAX] {
            assert_eq!(spec.generate(seed).unwrap(), spec.generate(seed).unwrap());
        }
        assert_ne!(spec.generate(1).unwrap(), spec.generate(2).unwrap());
    }
    assert!(GeneratorSpec::erdos_renyi((5, 4), 0.3).validate().is_err());
    assert!(GeneratorSpec::sbm(vec![], 0.3, 0.1).validate().is_err());
}
