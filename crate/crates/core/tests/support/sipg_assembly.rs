//! Element-by-element SIPG assembly used as an oracle for the patch-based operator.
//!
//! Everything here is evaluated pointwise in d dimensions with its own nodes and
//! quadrature, without 1D factor matrices.

#![allow(dead_code)]

const GAUSS4_X: [f64; 4] = [-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526];
const GAUSS4_W: [f64; 4] = [0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538];

pub fn lobatto_nodes(k: usize) -> Vec<f64> {
    match k {
        1 => vec![0.0, 1.0],
        2 => vec![0.0, 0.5, 1.0],
        3 => {
            let s = 0.5 / 5f64.sqrt();
            vec![0.0, 0.5 - s, 0.5 + s, 1.0]
        }
        _ => panic!("oracle supports k <= 3"),
    }
}

fn quad() -> Vec<(f64, f64)> {
    GAUSS4_X.iter().zip(GAUSS4_W).map(|(&x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect()
}

fn lag(nodes: &[f64], j: usize, x: f64) -> f64 {
    let mut p = 1.0;
    for (m, &xm) in nodes.iter().enumerate() {
        if m != j {
            p *= (x - xm) / (nodes[j] - xm);
        }
    }
    p
}

fn dlag(nodes: &[f64], j: usize, x: f64) -> f64 {
    let mut sum = 0.0;
    for (m, &xm) in nodes.iter().enumerate() {
        if m == j {
            continue;
        }
        let mut p = 1.0 / (nodes[j] - xm);
        for (l, &xl) in nodes.iter().enumerate() {
            if l != j && l != m {
                p *= (x - xl) / (nodes[j] - xl);
            }
        }
        sum += p;
    }
    sum
}

pub struct Mesh {
    pub dim: usize,
    pub k: usize,
    pub n: usize,
    pub h: f64,
    pub nodes: Vec<f64>,
}

impl Mesh {
    pub fn new(dim: usize, k: usize, level: usize) -> Self {
        let n = 1 << level;
        Self {
            dim,
            k,
            n,
            h: 1.0 / n as f64,
            nodes: lobatto_nodes(k),
        }
    }

    pub fn cell_dofs(&self) -> usize {
        (self.k + 1).pow(self.dim as u32)
    }

    pub fn n_cells(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn n_dofs(&self) -> usize {
        self.n_cells() * self.cell_dofs()
    }

    fn local_index(&self, j: usize) -> Vec<usize> {
        let mut rem = j;
        (0..self.dim)
            .map(|_| {
                let v = rem % (self.k + 1);
                rem /= self.k + 1;
                v
            })
            .collect()
    }

    fn cell_coords(&self, c: usize) -> Vec<usize> {
        let mut rem = c;
        (0..self.dim)
            .map(|_| {
                let v = rem % self.n;
                rem /= self.n;
                v
            })
            .collect()
    }

    fn cell_id(&self, coords: &[usize]) -> usize {
        coords.iter().rev().fold(0, |acc, &c| acc * self.n + c)
    }

    /// Value and physical gradient of local basis function `j` at reference point `xi`.
    fn eval(&self, j: usize, xi: &[f64]) -> (f64, Vec<f64>) {
        let idx = self.local_index(j);
        let vals: Vec<f64> = (0..self.dim).map(|a| lag(&self.nodes, idx[a], xi[a])).collect();
        let ders: Vec<f64> = (0..self.dim).map(|a| dlag(&self.nodes, idx[a], xi[a]) / self.h).collect();
        let value = vals.iter().product();
        let grad = (0..self.dim)
            .map(|a| (0..self.dim).map(|b| if a == b { ders[b] } else { vals[b] }).product())
            .collect();
        (value, grad)
    }

    fn points(&self, free: usize) -> Vec<(Vec<f64>, f64)> {
        let q = quad();
        let total = q.len().pow(free as u32);
        (0..total)
            .map(|mut t| {
                let mut pt = Vec::new();
                let mut w = 1.0;
                for _ in 0..free {
                    let (x, wx) = q[t % q.len()];
                    t /= q.len();
                    pt.push(x);
                    w *= wx;
                }
                (pt, w)
            })
            .collect()
    }

    /// Dense SIPG matrix, `a[i][j]` = a(φ_j, φ_i).
    pub fn assemble(&self) -> Vec<Vec<f64>> {
        let nd = self.n_dofs();
        let cd = self.cell_dofs();
        let mut a = vec![vec![0.0; nd]; nd];
        let h = self.h;
        let gamma = (self.k * (self.k + 1)) as f64 * 2.0 / h;
        let vol = h.powi(self.dim as i32);
        let area = h.powi(self.dim as i32 - 1);

        for c in 0..self.n_cells() {
            for (pt, w) in self.points(self.dim) {
                let evals: Vec<_> = (0..cd).map(|j| self.eval(j, &pt)).collect();
                for i in 0..cd {
                    for j in 0..cd {
                        let g: f64 = (0..self.dim).map(|d| evals[i].1[d] * evals[j].1[d]).sum();
                        a[c * cd + i][c * cd + j] += w * vol * g;
                    }
                }
            }
        }

        let embed = |axis: usize, at: f64, pt: &[f64]| -> Vec<f64> {
            let mut full = Vec::with_capacity(self.dim);
            let mut it = pt.iter();
            for d in 0..self.dim {
                full.push(if d == axis { at } else { *it.next().unwrap() });
            }
            full
        };

        for c in 0..self.n_cells() {
            let coords = self.cell_coords(c);
            for axis in 0..self.dim {
                // face on the upper side of the cell
                if coords[axis] + 1 < self.n {
                    let mut nb = coords.clone();
                    nb[axis] += 1;
                    let c2 = self.cell_id(&nb);
                    for (pt, w) in self.points(self.dim - 1) {
                        let minus: Vec<_> = (0..cd).map(|j| self.eval(j, &embed(axis, 1.0, &pt))).collect();
                        let plus: Vec<_> = (0..cd).map(|j| self.eval(j, &embed(axis, 0.0, &pt))).collect();
                        // trace data over the DoFs of both cells: (global index, jump, normal average)
                        let mut data = Vec::with_capacity(2 * cd);
                        for j in 0..cd {
                            data.push((c * cd + j, minus[j].0, 0.5 * minus[j].1[axis]));
                            data.push((c2 * cd + j, -plus[j].0, 0.5 * plus[j].1[axis]));
                        }
                        for &(gi, ji, ai) in &data {
                            for &(gj, jj, aj) in &data {
                                a[gi][gj] += w * area * (gamma * ji * jj - aj * ji - jj * ai);
                            }
                        }
                    }
                }
                for (side, at, normal) in [(0usize, 0.0, -1.0), (self.n - 1, 1.0, 1.0)] {
                    if coords[axis] != side {
                        continue;
                    }
                    for (pt, w) in self.points(self.dim - 1) {
                        let ev: Vec<_> = (0..cd).map(|j| self.eval(j, &embed(axis, at, &pt))).collect();
                        for i in 0..cd {
                            for j in 0..cd {
                                let (vi, dni) = (ev[i].0, normal * ev[i].1[axis]);
                                let (vj, dnj) = (ev[j].0, normal * ev[j].1[axis]);
                                a[c * cd + i][c * cd + j] += w * area * (gamma * vi * vj - dnj * vi - vj * dni);
                            }
                        }
                    }
                }
            }
        }
        a
    }
}
