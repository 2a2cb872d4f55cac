//! Isomorphism of case graphs up to renaming of ids.
//!
//! Elements and links both become labelled nodes; a link node has one edge
//! in from its source and one edge out to its target. Colour refinement
//! prunes candidates before a backtracking search.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::model::{Case, Fragment};
use crate::Id;

struct Graph {
    labels: Vec<String>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    edges: HashSet<(usize, usize)>,
}

fn graph(f: &Fragment) -> Graph {
    let mut index: BTreeMap<&Id, usize> = BTreeMap::new();
    let mut labels = Vec::new();
    for e in f.elements().values() {
        index.insert(&e.id, labels.len());
        let slots = e.slots.as_ref().map(|s| s.fields().map(|(_, v)| v.to_string()));
        labels.push(format!(
            "E|{}|{:?}|{:?}|{:?}|{:?}|{:?}|{}",
            e.kind,
            e.text,
            e.stage,
            e.scope,
            slots,
            e.locator.as_ref().map(ToString::to_string),
            e.tier
        ));
    }
    for l in f.links().values() {
        index.insert(&l.id, labels.len());
        labels.push(format!(
            "L|{}|{:?}",
            l.kind,
            l.qualifier.as_ref().map(|q| (q.label.to_string(), q.note.clone()))
        ));
    }
    let n = labels.len();
    let (mut out, mut inc) = (vec![Vec::new(); n], vec![Vec::new(); n]);
    let mut edges = HashSet::new();
    for l in f.links().values() {
        let me = index[&l.id];
        for (a, b) in [(index[&l.from], me), (me, index[&l.to])] {
            out[a].push(b);
            inc[b].push(a);
            edges.insert((a, b));
        }
    }
    Graph { labels, out, inc, edges }
}

/// Joint colour refinement so colours are comparable across both graphs.
fn refine(a: &Graph, b: &Graph) -> (Vec<usize>, Vec<usize>) {
    let mut intern: HashMap<String, usize> = HashMap::new();
    let colour = |key: String, intern: &mut HashMap<String, usize>| {
        let next = intern.len();
        *intern.entry(key).or_insert(next)
    };
    let mut ca: Vec<usize> = a.labels.iter().map(|l| colour(l.clone(), &mut intern)).collect();
    let mut cb: Vec<usize> = b.labels.iter().map(|l| colour(l.clone(), &mut intern)).collect();
    for _ in 0..a.labels.len().max(1) {
        let mut round: HashMap<String, usize> = HashMap::new();
        let step = |g: &Graph, c: &[usize], round: &mut HashMap<String, usize>| -> Vec<usize> {
            (0..g.labels.len())
                .map(|v| {
                    let mut ins: Vec<usize> = g.inc[v].iter().map(|&u| c[u]).collect();
                    let mut outs: Vec<usize> = g.out[v].iter().map(|&u| c[u]).collect();
                    ins.sort_unstable();
                    outs.sort_unstable();
                    let key = format!("{}|{ins:?}|{outs:?}", c[v]);
                    let next = round.len();
                    *round.entry(key).or_insert(next)
                })
                .collect()
        };
        let na = step(a, &ca, &mut round);
        let nb = step(b, &cb, &mut round);
        let classes = |c: &[usize]| c.iter().collect::<HashSet<_>>().len();
        let stable = classes(&na) == classes(&ca) && classes(&nb) == classes(&cb);
        ca = na;
        cb = nb;
        if stable {
            break;
        }
    }
    (ca, cb)
}

pub fn isomorphic(a: &Fragment, b: &Fragment) -> bool {
    if a.elements().len() != b.elements().len() || a.links().len() != b.links().len() {
        return false;
    }
    let (ga, gb) = (graph(a), graph(b));
    let (ca, cb) = refine(&ga, &gb);
    let histogram = |c: &[usize]| {
        let mut h = c.to_vec();
        h.sort_unstable();
        h
    };
    if histogram(&ca) != histogram(&cb) {
        return false;
    }
    let mut order: Vec<usize> = (0..ga.labels.len()).collect();
    let class_size = |v: usize| cb.iter().filter(|&&c| c == ca[v]).count();
    order.sort_by_key(|&v| (class_size(v), v));
    let mut map = vec![usize::MAX; ga.labels.len()];
    let mut used = vec![false; gb.labels.len()];
    search(&ga, &gb, &ca, &cb, &order, 0, &mut map, &mut used)
}

#[allow(clippy::too_many_arguments)]
fn search(
    ga: &Graph,
    gb: &Graph,
    ca: &[usize],
    cb: &[usize],
    order: &[usize],
    depth: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    let Some(&v) = order.get(depth) else { return true };
    for w in 0..gb.labels.len() {
        if used[w] || cb[w] != ca[v] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&u| {
            let mu = map[u];
            ga.edges.contains(&(u, v)) == gb.edges.contains(&(mu, w))
                && ga.edges.contains(&(v, u)) == gb.edges.contains(&(w, mu))
        });
        if !consistent {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if search(ga, gb, ca, cb, order, depth + 1, map, used) {
            return true;
        }
        used[w] = false;
        map[v] = usize::MAX;
    }
    false
}

/// Graph isomorphism of two cases, ignoring metadata, challenges and appraisals.
pub fn isomorphic_cases(a: &Case, b: &Case) -> bool {
    isomorphic(a.graph(), b.graph())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::id;
    use crate::model::{Element, Link};

    fn chain(names: [&str; 3], text: &str) -> Fragment {
        let [w, v, l] = names.map(|s| Id::new(s).unwrap());
        Fragment::default()
            .add_element(Element::evidential_claim(w.clone(), text))
            .unwrap()
            .add_element(Element::evidence(v.clone(), crate::model::Locator::parse("x").unwrap(), "e"))
            .unwrap()
            .add_link(Link::evidences(l, v, w))
            .unwrap()
    }

    #[test]
    fn renaming_preserves_isomorphism() {
        assert!(isomorphic(&chain(["A", "B", "L"], "t"), &chain(["Z", "Y", "M"], "t")));
        assert!(!isomorphic(&chain(["A", "B", "L"], "t"), &chain(["A", "B", "L"], "u")));
        let extra = chain(["A", "B", "L"], "t").add_element(Element::warrant(id!("W"), "w")).unwrap();
        assert!(!isomorphic(&chain(["A", "B", "L"], "t"), &extra));
    }
}
