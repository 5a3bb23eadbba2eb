//! Reverse-mode derivatives.

use super::{Circuit, CircuitError, Gate, GateId};

impl Circuit {
    /// A circuit with outputs `f, df/dx_0, ..., df/dx_{m-1}` for the single
    /// output `f` of `self`.
    ///
    /// One backward sweep over the gates: every gate adds at most five gates
    /// (a division adds `t = a/r`, `t*g`, `-t*g` and two accumulations), so
    /// the result has at most `5 |C| + O(m)` gates. Gates whose adjoint stays
    /// zero are skipped.
    pub fn derivatives(&self) -> Result<Circuit, CircuitError> {
        if self.outputs.len() != 1 {
            return Err(CircuitError::OutputCount(self.outputs.len(), 1));
        }
        let m = self.num_inputs;
        let mut c = Circuit::new(m);
        let inputs: Vec<GateId> = (0..m).map(|k| c.input(k)).collect();
        let all: Vec<GateId> = (0..self.size()).collect();
        // forward copy keeps ids aligned with `self`
        let image = c.import(self, &inputs, &all);
        let f = image[self.outputs[0]];

        let mut adj: Vec<Option<GateId>> = vec![None; self.size()];
        adj[self.outputs[0]] = Some(c.one());
        let mut grad: Vec<Option<GateId>> = vec![None; m];
        let accumulate = |c: &mut Circuit, slot: &mut Option<GateId>, x: GateId| {
            *slot = Some(match *slot {
                Some(y) => c.add(y, x),
                None => x,
            });
        };
        for g in (0..self.size()).rev() {
            let Some(a) = adj[g] else { continue };
            match self.gates[g] {
                Gate::Input(k) => accumulate(&mut c, &mut grad[k], a),
                Gate::Const(_) => {}
                Gate::Add(l, r) => {
                    accumulate(&mut c, &mut adj[l], a);
                    accumulate(&mut c, &mut adj[r], a);
                }
                Gate::Mul(l, r) => {
                    let dl = c.mul(a, image[r]);
                    let dr = c.mul(a, image[l]);
                    accumulate(&mut c, &mut adj[l], dl);
                    accumulate(&mut c, &mut adj[r], dr);
                }
                Gate::Div(l, r) => {
                    // g = l/r: dg/dl = 1/r, dg/dr = -g/r
                    let t = c.div(a, image[r]);
                    let tg = c.mul(t, image[g]);
                    let ntg = c.neg(tg);
                    accumulate(&mut c, &mut adj[l], t);
                    accumulate(&mut c, &mut adj[r], ntg);
                }
            }
        }
        let mut outs = vec![f];
        for slot in grad {
            outs.push(slot.unwrap_or_else(|| c.zero()));
        }
        c.set_outputs(outs);
        Ok(c.prune())
    }
}
