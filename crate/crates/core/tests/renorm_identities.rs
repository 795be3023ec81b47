use num_rational::Rational64;
use regstruct::*;

fn engine(flavour: Flavour) -> RenormEngine {
    RenormEngine::new(Grading::new(vec![Degree::frac(-5, 2, -1, 1)], Rational64::from_integer(2)), flavour)
}

fn sym(code: &str) -> DecoratedTree {
    cubic_symbol(code).unwrap()
}

fn tp(pairs: &[(&str, &str)]) -> TreePolynomial {
    let mut p = TreePolynomial::zero();
    for (code, c) in pairs {
        p.add_term(sym(code), c.parse().unwrap());
    }
    p
}

fn cubic_character() -> Character {
    Character::new(Flavour::Plain).with(sym("2"), "-c1".parse().unwrap()).with(sym("22"), "-c2".parse().unwrap())
}

#[test]
fn worked_examples() {
    let e = engine(Flavour::Plain);
    let g = cubic_character();
    assert_eq!(e.act_on_tree(&g, &sym("3")).unwrap(), tp(&[("3", "1"), ("1", "-3*c1")]));
    assert_eq!(e.act_on_tree(&g, &sym("31")).unwrap(), tp(&[("31", "1"), ("11", "-3*c1")]));
    assert_eq!(
        e.act_on_tree(&g, &sym("32")).unwrap(),
        tp(&[("32", "1"), ("12", "-3*c1"), ("30", "-c1"), ("01", "3*c1^2"), ("1", "-3*c2")])
    );
}

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regstruct::renorm::{contract, enumerate_subgraphs, extract, Extracted, Extraction, FlatTree};

fn cubic_table() -> SymbolTable {
    generate_symbols(&EquationSpec::cubic(3, NoiseDegree::White)).unwrap()
}

fn random_character(rng: &mut ChaCha8Rng, support: &[DecoratedTree]) -> Character {
    let mut c = Character::new(Flavour::Plain);
    for t in support {
        let v = BigRational::new(BigInt::from(rng.gen_range(-6i64..=6)), BigInt::from(rng.gen_range(1i64..=4)));
        c.set(t.clone(), Poly::constant(v));
    }
    c
}

fn support(table: &SymbolTable) -> Vec<DecoratedTree> {
    table.negative_sector().into_iter().filter(|t| t.edge_count() > 0).cloned().collect()
}

#[test]
fn contraction_of_two_coloured_components() {
    // vertices carry distinct space labels so that they can be told apart
    let v = |n: u32| format!("X^(0,{n})");
    let text = format!(
        "{root}*I({left}*I({leftl}*I({leftll})*I({leftlc})*I({leftlr}))*I({leftr}))\
         *I({right}*I({rightl}*I({rightll})*I({rightlr}))*I({rightr}*I({rightrl})*I({rightrr})))",
        root = v(1),
        left = v(6),
        leftl = v(3),
        leftll = v(2),
        leftlc = v(5),
        leftlr = v(4),
        leftr = v(7),
        right = v(13),
        rightl = v(8),
        rightll = v(9),
        rightlr = v(10),
        rightr = v(11),
        rightrl = v(12),
        rightrr = v(14),
    );
    let t: DecoratedTree = text.parse().unwrap();
    assert_eq!(t.edge_count(), 13);
    let flat = FlatTree::new(&t);
    let coloured = [3u32, 4, 7, 13, 8, 10, 11, 12];
    let mut mask = 0u64;
    for e in 0..flat.edge_count() {
        let (_, child) = flat.edge(e);
        if coloured.contains(&flat.label(child).poly.get(1)) {
            mask |= 1 << e;
        }
    }
    let x = Extraction { mask, components: flat.components(mask) };
    assert_eq!(x.components.len(), 2);
    let grading = Grading::new(vec![Degree::frac(-5, 2, -1, 1)], Rational64::from_integer(2));
    let q = contract(&flat, &x, &grading, Flavour::Plain).unwrap();
    let blue = 1 + 13 + 8 + 10 + 11 + 12;
    let red = 6 + 3 + 7 + 4;
    let expected: DecoratedTree =
        format!("{}*I({}*I({})*I({}))*I({})*I({})", v(blue), v(red), v(2), v(5), v(9), v(14)).parse().unwrap();
    assert_eq!(q, expected);
    assert_eq!(q.edge_count(), 5);
}

/// Independent component oracle: union-find over explicit edge lists.
fn union_find_components(flat: &FlatTree, mask: u64) -> Vec<Vec<usize>> {
    let n = flat.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let mut touched = vec![false; n];
    for e in 0..flat.edge_count() {
        if mask & (1 << e) != 0 {
            let (a, b) = flat.edge(e);
            touched[a] = true;
            touched[b] = true;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (v, &hit) in touched.iter().enumerate() {
        if hit {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

#[test]
fn subgraph_components_match_union_find() {
    let flat = FlatTree::new(&sym("32"));
    let all: Vec<_> = enumerate_subgraphs(&flat).collect();
    assert_eq!(all.len(), 64);
    let masks: std::collections::BTreeSet<u64> = all.iter().map(|x| x.mask).collect();
    assert_eq!(masks.len(), 64);
    for x in all {
        let mut mine = x.components.clone();
        mine.sort();
        assert_eq!(mine, union_find_components(&flat, x.mask), "mask {:b}", x.mask);
    }
}

#[test]
fn extraction_is_multiplicative_over_components() {
    let grading = Grading::new(vec![Degree::frac(-5, 2, -1, 1)], Rational64::from_integer(2));
    for code in ["32", "22", "31"] {
        let flat = FlatTree::new(&sym(code));
        for x in enumerate_subgraphs(&flat) {
            let whole = extract(&flat, &x, &grading, Flavour::Plain).unwrap();
            let mut product = Some(Forest::empty());
            for comp in &x.components {
                let single = Extraction { mask: x.mask, components: vec![comp.clone()] };
                match extract(&flat, &single, &grading, Flavour::Plain).unwrap() {
                    Extracted::Zero => product = None,
                    Extracted::Forest(f) => product = product.map(|p| p.product(&f)),
                }
            }
            match (whole, product) {
                (Extracted::Zero, None) => {}
                (Extracted::Forest(a), Some(b)) => assert_eq!(a, b),
                other => panic!("mismatch {other:?}"),
            }
        }
    }
}

#[test]
fn group_law_and_inverse_on_small_table_trees() {
    let table = cubic_table();
    let e = engine(Flavour::Plain);
    let small: Vec<DecoratedTree> = table.trees().filter(|t| t.edge_count() <= 6).cloned().collect();
    let supp = support(&table);
    let domain = e.extraction_domain(&small).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let f = random_character(&mut rng, &supp);
        let g = random_character(&mut rng, &supp);
        let fg = e.compose(&f, &g, &domain).unwrap();
        let g_inv = e.invert(&g, &domain).unwrap();
        for t in &small {
            let lhs = e.renorm_map(&f, &e.act_on_tree(&g, t).unwrap()).unwrap();
            assert_eq!(lhs, e.act_on_tree(&fg, t).unwrap(), "group law fails on {t}");
            let back = e.renorm_map(&g_inv, &e.act_on_tree(&g, t).unwrap()).unwrap();
            assert_eq!(back, TreePolynomial::tree(t.clone()), "inverse fails on {t}");
        }
    }
}

#[test]
fn inverse_is_two_sided() {
    let table = cubic_table();
    let e = engine(Flavour::Plain);
    let domain = e.extraction_domain(&table.trees().cloned().collect::<Vec<_>>()).unwrap();
    let g = cubic_character();
    let h = e.invert(&g, &domain).unwrap();
    assert_eq!(h.value(&sym("2")), Poly::var("c1"));
    let counit = Character::counit(Flavour::Plain);
    assert_eq!(e.compose(&h, &g, &domain).unwrap(), counit);
    assert_eq!(e.compose(&g, &h, &domain).unwrap(), counit);
}

#[test]
fn action_lowers_edge_count() {
    let table = cubic_table();
    let e = engine(Flavour::Plain);
    let g = cubic_character();
    for t in table.trees() {
        let diff = e.act_on_tree(&g, t).unwrap() - TreePolynomial::tree(t.clone());
        for (s, _) in diff.terms() {
            assert!(s.edge_count() < t.edge_count(), "{s} from {t}");
        }
    }
}

#[test]
fn extended_action_is_homogeneous_and_projects() {
    let table = cubic_table();
    let plain = engine(Flavour::Plain);
    let ext = engine(Flavour::Extended);
    let g = cubic_character();
    let grading = ext.grading().clone();
    for t in table.trees() {
        let out = ext.act_on_tree(&g, t).unwrap();
        let d = grading.degree(t).unwrap();
        for (s, _) in out.terms() {
            assert_eq!(grading.degree(s).unwrap(), d, "{s} from {t}");
        }
        assert_eq!(out.project_extended(), plain.act_on_tree(&g, &t.project_extended()).unwrap());
    }
}

#[test]
fn extended_contraction_of_root_cherry() {
    let ext = engine(Flavour::Extended);
    let g = Character::new(Flavour::Plain).with(sym("2"), Poly::one());
    let out = ext.act_on_tree(&g, &sym("22")).unwrap();
    let expected: DecoratedTree = "I(I(Xi)*I(Xi)){beta=-1 - 2k}".parse().unwrap();
    assert_eq!(out.coefficient(&expected), Poly::one());
}
