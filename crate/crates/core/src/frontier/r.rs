//! Frontier construction for ontologies with role inclusions.

use super::{away_atoms, merge, Ctx, GenCandidate, Provenance};
use crate::reasoner::kb::TOP;
use crate::syntax::Symbol;

/// `F0(x)`: the generalizations of `q_x`.
pub(crate) fn generalize(ctx: &mut Ctx, x: &Symbol) -> Vec<GenCandidate> {
    if let Some(v) = ctx.memo_get(x) {
        return v.clone();
    }
    let mut out = ctx.drop_atoms(x);
    let children = ctx.children[x].clone();
    for (r, y) in children {
        let below = generalize(ctx, &y);
        let mut cand = ctx.without_child(x, &y);
        cand.provenance = Provenance::GeneralizeSub {
            role: r.clone(),
            from: x.clone(),
            to: y.clone(),
        };
        for g in &below {
            let (copy, down, root) = ctx.copy(g);
            merge(&mut cand.query, &copy);
            cand.down.extend(down);
            cand.query.add_role(&r, x.clone(), root);
        }
        let rid = ctx.role_id(&r);
        let kb = ctx.kb;
        let stricter: Vec<_> = kb
            .supers(rid)
            .iter()
            .copied()
            .filter(|&s| !kb.is_sub_role(s, rid))
            .collect();
        for s in stricter {
            let qy = GenCandidate {
                query: ctx.subquery(&y),
                down: super::identity(&ctx.subquery(&y)),
                provenance: cand.provenance.clone(),
            };
            let (copy, down, root) = ctx.copy(&qy);
            merge(&mut cand.query, &copy);
            cand.down.extend(down);
            cand.query.add_role(&kb.role(s), x.clone(), root);
        }
        out.push(cand);
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
        for (r, a) in ctx.model.leadsto_r(node) {
            for &s in kb.supers(r) {
                let guard = ctx.implied_by_exists(s).iter().all(|b| labels.contains(b));
                if !guard {
                    continue;
                }
                let z = ctx.fresh("z");
                let x2 = ctx.fresh(xd.as_str());
                p.down.insert(x2.clone(), xd.clone());
                p.query.add_role(&kb.role(s), x.clone(), z.clone());
                if a != TOP {
                    let name = kb.concept_name(kb.concept_of_basic(a).unwrap()).clone();
                    p.query.add_concept(name, z.clone());
                }
                p.query.add_role(&kb.role(r), x2.clone(), z.clone());
                ctx.glue_query(&mut p, &xd, &x2);
            }
        }
    }

    // reattach q below atoms that point away from the answer
    for (x, _, y) in away_atoms(&original) {
        let (xd, yd) = (cand.down[&x].clone(), cand.down[&y].clone());
        let (nx, ny) = (ctx.node(&xd), ctx.node(&yd));
        let roles: Vec<usize> = ctx
            .model
            .abox_neighbours(nx)
            .iter()
            .filter(|(b, _)| *b == ny)
            .flat_map(|(_, set)| set.ones().collect::<Vec<_>>())
            .collect();
        for r in roles {
            let z = ctx.fresh(xd.as_str());
            p.down.insert(z.clone(), xd.clone());
            p.query.add_role(&kb.role(r), z.clone(), y.clone());
            ctx.glue_query(&mut p, &xd, &z);
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use crate::frontier::frontier_r;
    use crate::parse::{parse_cq, parse_ontology};
    use crate::reasoner::Reasoner;

    #[test]
    fn conjunction_under_cycle_has_two_members() {
        let o = parse_ontology("A sub some r\nsome r sub A\nr rsub s").unwrap();
        let f = frontier_r(&o, &parse_cq("eliq: A & B").unwrap()).unwrap();
        assert_eq!(f.members.len(), 2);
        let r = Reasoner::new(&o).unwrap();
        let p1 = parse_cq("q(x0) :- B(x0), s(x0,z), r(x1,z), A(x1), B(x1)").unwrap();
        assert!(f.members.iter().any(|m| r.equivalent(m, &p1).unwrap()));
    }

    #[test]
    fn leaf_blocked_by_incoming_role() {
        let o = parse_ontology("some r- sub A").unwrap();
        let f = frontier_r(&o, &parse_cq("eliq: some r . A").unwrap()).unwrap();
        // only generalization: drop the whole edge
        assert_eq!(f.members.len(), 1);
    }
}
