use sumsetlab_core::group::read_raw_table;
use sumsetlab_core::{build_group, validate_table, AxiomViolation, FiniteGroup, GroupSpec, CORPUS};

fn group(spec: &str) -> FiniteGroup {
    build_group(&spec.parse().unwrap()).unwrap()
}

#[test]
fn corpus_satisfies_axioms() {
    for spec in CORPUS {
        let g = group(spec);
        let report = g.validate();
        assert!(report.is_valid(), "{spec}: {:?}", report.violations);
        assert_eq!(g.identity(), 0, "{spec}");
        for a in g.elements() {
            assert_eq!(g.mul(a, g.inv(a)), 0);
            assert_eq!(g.mul(g.inv(a), a), 0);
        }
    }
}

#[test]
fn element_orders_divide_group_order() {
    for spec in CORPUS {
        let g = group(spec);
        for a in g.elements() {
            let k = g.element_order(a);
            assert_eq!(g.order() % k, 0, "{spec}: order of {a} is {k}");
            assert_eq!(g.pow(a, k as u64), 0);
        }
    }
}

#[test]
fn spec_orders_match_built_orders() {
    for spec in CORPUS {
        let parsed: GroupSpec = spec.parse().unwrap();
        assert_eq!(parsed.order(), Some(group(spec).order()), "{spec}");
        assert_eq!(parsed.to_string().parse::<GroupSpec>().unwrap(), parsed);
    }
}

#[test]
fn direct_product_is_componentwise() {
    let g = group("product:quaternion,cyclic:3");
    let q = group("quaternion");
    assert_eq!(g.order(), 24);
    for x in g.elements() {
        for y in g.elements() {
            let (qx, cx) = (x / 3, x % 3);
            let (qy, cy) = (y / 3, y % 3);
            assert_eq!(g.mul(x, y), q.mul(qx, qy) * 3 + (cx + cy) % 3);
        }
    }
}

#[test]
fn construction_is_deterministic() {
    for spec in CORPUS {
        assert_eq!(group(spec).table(), group(spec).table(), "{spec}");
    }
}

/// Upper unitriangular 3x3 matrices mod p, multiplied as plain matrices.
fn matrix_product(p: u32, x: u32, y: u32) -> u32 {
    let unpack = |e: u32| {
        let (a, b, c) = (e / (p * p), (e / p) % p, e % p);
        [[1, a, c], [0, 1, b], [0, 0, 1]]
    };
    let (m, n) = (unpack(x), unpack(y));
    let mut r = [[0u32; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = (0..3).map(|k| m[i][k] * n[k][j]).sum::<u32>() % p;
        }
    }
    r[0][1] * p * p + r[1][2] * p + r[0][2]
}

#[test]
fn heisenberg_matches_matrix_multiplication() {
    let g = group("heisenberg:3");
    assert_eq!(g.order(), 27);
    assert!(!g.is_abelian());
    for x in g.elements() {
        for y in g.elements() {
            assert_eq!(g.mul(x, y), matrix_product(3, x, y));
        }
    }
}

#[test]
fn quaternion_identities() {
    let q = group("quaternion");
    // 1,-1,i,-i,j,-j,k,-k
    assert_eq!(q.mul(2, 2), 1);
    assert_eq!(q.mul(2, 4), 6);
    assert_eq!(q.mul(4, 2), 7);
    assert_eq!(q.element_order(4), 4);
}

#[test]
fn frobenius_relation() {
    let g = group("frobenius:7:3:2");
    // (x, y) at x*3 + y; y acts on x by multiplication by 2^y
    let t = 1; // (0, 1)
    let s = 3; // (1, 0)
    assert_eq!(g.conjugate(s, t), g.pow(s, 2));
}

#[test]
fn invalid_specs_are_rejected() {
    for bad in ["cyclic:0", "heisenberg:4", "frobenius:7:3:3", "frobenius:7:3:1", "product:cyclic:2"] {
        let parsed = bad.parse::<GroupSpec>().and_then(|s| build_group(&s));
        assert!(parsed.is_err(), "{bad} accepted");
    }
}

#[test]
fn table_file_round_trip_with_relabeling() {
    let dir = std::env::temp_dir().join(format!("sumsetlab-groups-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("z3.txt");
    // identity is 2
    std::fs::write(&path, "3\n1 2 0\n2 0 1\n0 1 2\n").unwrap();
    let g = build_group(&GroupSpec::Table(path.clone())).unwrap();
    assert_eq!(g.order(), 3);
    assert!(g.validate().is_valid());
    assert!(g.label().contains("relabeled"));
    let (n, op) = read_raw_table(&path).unwrap();
    assert_eq!((n, op.len()), (3, 9));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn validator_reports_concrete_violations() {
    let r = validate_table(2, &[0, 1, 1, 2], 512);
    assert!(matches!(r.violations[0], AxiomViolation::EntryOutOfRange { a: 1, b: 1, value: 2 }));
    let loop5 = [0, 1, 2, 3, 4, 1, 0, 3, 4, 2, 2, 4, 0, 1, 3, 3, 2, 4, 0, 1, 4, 3, 1, 2, 0];
    let r = validate_table(5, &loop5, 512);
    assert!(r.violations.iter().any(|v| matches!(v, AxiomViolation::NotAssociative { .. })));
    assert!(FiniteGroup::from_table(5, loop5.to_vec(), "loop").is_err());
}
