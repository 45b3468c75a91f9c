//! Frontier construction for ontologies with functionality assertions
//! (no inverse-functional existentials on right-hand sides).

use std::collections::VecDeque;

use super::{away_atoms, merge, Ctx, GenCandidate, Provenance};
use crate::reasoner::kb::inv;
use crate::syntax::{Role, Symbol};

/// `F0(x)`. Under `func(R)` one candidate is produced per choice of the
/// generalized `R`-child.
pub(crate) fn generalize(ctx: &mut Ctx, x: &Symbol) -> Vec<GenCandidate> {
    if let Some(v) = ctx.memo_get(x) {
        return v.clone();
    }
    let mut out = ctx.drop_atoms(x);
    let children = ctx.children[x].clone();
    for (r, y) in children {
        let below = generalize(ctx, &y);
        let mut base = ctx.without_child(x, &y);
        base.provenance = Provenance::GeneralizeSub {
            role: r.clone(),
            from: x.clone(),
            to: y.clone(),
        };
        let rid = ctx.role_id(&r);
        if ctx.kb.is_functional(rid) && !below.is_empty() {
            for g in &below {
                let mut cand = base.clone();
                let (copy, down, root) = ctx.copy(g);
                merge(&mut cand.query, &copy);
                cand.down.extend(down);
                cand.query.add_role(&r, x.clone(), root);
                out.push(cand);
            }
        } else {
            let mut cand = base;
            if !ctx.kb.is_functional(rid) {
                for g in &below {
                    let (copy, down, root) = ctx.copy(g);
                    merge(&mut cand.query, &copy);
                    cand.down.extend(down);
                    cand.query.add_role(&r, x.clone(), root);
                }
            }
            out.push(cand);
        }
    }
    ctx.memo_put(x, out.clone());
    out
}

/// Compensation for one candidate of the answer variable.
pub(crate) fn compensate(ctx: &mut Ctx, cand: &GenCandidate) -> GenCandidate {
    let kb = ctx.kb;
    let mut p = cand.clone();
    let original = cand.query.clone();

    // successors that the dropped atoms used to imply
    for x in original.vars() {
        let xd = cand.down[&x].clone();
        let node = ctx.node(&xd);
        let labels = original.labels_of(&x);
        for (r, m) in ctx.model.leadsto_f(node) {
            let guard = ctx.implied_by_exists(r).iter().all(|b| labels.contains(b));
            if !guard {
                continue;
            }
            let z = ctx.fresh("z");
            p.query.add_role(&kb.role(r), x.clone(), z.clone());
            for c in m {
                p.query.add_concept(kb.concept_name(c).clone(), z.clone());
            }
        }
    }

    // mark atoms pointing away from the answer
    let mut queue: VecDeque<(Symbol, Role, Symbol)> = VecDeque::new();
    for (x, r, y) in away_atoms(&p.query) {
        if kb.is_functional(inv(ctx.role_id(&r))) {
            continue;
        }
        let xd = p.down[&x].clone();
        let x2 = ctx.fresh(xd.as_str());
        p.down.insert(x2.clone(), xd);
        p.query.add_role(&r.inverse(), y.clone(), x2.clone());
        queue.push_back((y, r.inverse(), x2));
    }

    // propagate marks, gluing copies of q where functionality allows
    while let Some((x, r, y)) = queue.pop_front() {
        let rid = ctx.role_id(&r);
        let yd = p.down[&y].clone();
        let xd = p.down.get(&x).cloned();
        let back = r.inverse();
        let has_back = ctx.adjacency[&yd].iter().any(|(s, _)| *s == back);
        if !kb.is_functional(inv(rid)) || !has_back {
            ctx.glue_query(&mut p, &yd, &y);
            continue;
        }
        // (i)
        for a in ctx.q.labels_of(&yd) {
            p.query.add_concept(a, y.clone());
        }
        // (ii)
        let atoms = ctx.adjacency[&yd].clone();
        for (s, w) in atoms {
            if s == back && Some(&w) == xd.as_ref() {
                continue;
            }
            let w2 = ctx.fresh(w.as_str());
            p.down.insert(w2.clone(), w.clone());
            p.query.add_role(&s, y.clone(), w2.clone());
            queue.push_back((y.clone(), s, w2));
        }
        // (iii)
        let node = ctx.node(&yd);
        for (s, m) in ctx.model.leadsto_f(node) {
            let u = ctx.fresh("u");
            let y2 = ctx.fresh(yd.as_str());
            p.down.insert(y2.clone(), yd.clone());
            let role = kb.role(s);
            p.query.add_role(&role, y.clone(), u.clone());
            p.query.add_role(&role.inverse(), u.clone(), y2.clone());
            for c in m {
                p.query.add_concept(kb.concept_name(c).clone(), u.clone());
            }
            queue.push_back((u, role.inverse(), y2));
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use crate::frontier::frontier_f;
    use crate::parse::{parse_cq, parse_ontology};
    use crate::reasoner::Reasoner;

    #[test]
    fn functional_role_member() {
        let o = parse_ontology("func s").unwrap();
        let q = parse_cq("q(x0) :- r(x0,y), s(x0,z), A(z)").unwrap();
        let f = frontier_f(&o, &q).unwrap();
        let p = parse_cq(
            "q(x0) :- r(x0,y), s(x0,z), s(x0',z), r(x0',y1), r(x1,y1), s(x1,z1), A(z1), \
             r(x2,y), s(x2,z2), A(z2), r(x2,y2)",
        )
        .unwrap();
        let r = Reasoner::new(&o).unwrap();
        assert!(f.members.iter().any(|m| r.equivalent(m, &p).unwrap()));
        for m in &f.members {
            assert!(!r.contained(m, &q).unwrap());
        }
    }

    #[test]
    fn functional_child_without_generalizations_is_removed() {
        let o = parse_ontology("func r").unwrap();
        let f = frontier_f(&o, &parse_cq("eliq: some r").unwrap()).unwrap();
        assert_eq!(f.members.len(), 1);
        assert_eq!(f.members[0].var_count(), 1);
    }
}
