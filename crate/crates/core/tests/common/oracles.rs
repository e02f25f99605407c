use num_complex::Complex64;

/// Evjen neutralized-cube sum for rock salt. Returns the signed Madelung
/// constant referred to the nearest-neighbor distance (negative, ≈ -1.74756).
pub fn evjen_rock_salt(shells: i64) -> f64 {
    let mut sum = 0.0;
    for i in -shells..=shells {
        for j in -shells..=shells {
            for k in -shells..=shells {
                if i == 0 && j == 0 && k == 0 {
                    continue;
                }
                let weight = [i, j, k]
                    .iter()
                    .map(|&c| if c.abs() == shells { 0.5 } else { 1.0 })
                    .product::<f64>();
                let charge = if (i + j + k).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let r = ((i * i + j * j + k * k) as f64).sqrt();
                sum += weight * charge / r;
            }
        }
    }
    sum
}

/// Evjen-type sum for the CsCl structure around a cation at the origin.
/// Signed, referred to the nearest-neighbor distance (≈ -1.76267).
///
/// A neutral cube bounded by cation planes has second moment Σqr² = +¾a²
/// per cell and one bounded by anion planes −¾a²; each alone converges to a
/// value shifted by a constant, so the two are averaged.
pub fn evjen_cesium_chloride(shells: i64) -> f64 {
    let weight = |coords: [f64; 3], bound: f64| -> f64 {
        coords
            .iter()
            .map(|c| if (c.abs() - bound).abs() < 1e-9 { 0.5 } else { 1.0 })
            .product()
    };
    let inv = |p: [f64; 3]| 1.0 / (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();

    // cube [-n, n]³: cations on the boundary
    let n = shells as f64;
    let mut cation_bounded = 0.0;
    for i in -shells..=shells {
        for j in -shells..=shells {
            for k in -shells..=shells {
                if i == 0 && j == 0 && k == 0 {
                    continue;
                }
                let p = [i as f64, j as f64, k as f64];
                cation_bounded += weight(p, n) * inv(p);
            }
        }
    }
    for i in -shells..shells {
        for j in -shells..shells {
            for k in -shells..shells {
                cation_bounded -= inv([i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5]);
            }
        }
    }

    // cube [-(n+½), n+½]³: anions on the boundary
    let m = n + 0.5;
    let mut anion_bounded = 0.0;
    for i in -shells..=shells {
        for j in -shells..=shells {
            for k in -shells..=shells {
                if i == 0 && j == 0 && k == 0 {
                    continue;
                }
                anion_bounded += inv([i as f64, j as f64, k as f64]);
            }
        }
    }
    for i in -shells - 1..=shells {
        for j in -shells - 1..=shells {
            for k in -shells - 1..=shells {
                let p = [i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5];
                anion_bounded -= weight(p, m) * inv(p);
            }
        }
    }

    0.5 * (cation_bounded + anion_bounded) * 3f64.sqrt() / 2.0
}

pub type Dense = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(a: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn rx(t: f64) -> Dense {
    let (cs, sn) = ((t / 2.0).cos(), (t / 2.0).sin());
    vec![vec![c(cs, 0.0), c(0.0, -sn)], vec![c(0.0, -sn), c(cs, 0.0)]]
}

pub fn ry(t: f64) -> Dense {
    let (cs, sn) = ((t / 2.0).cos(), (t / 2.0).sin());
    vec![vec![c(cs, 0.0), c(-sn, 0.0)], vec![c(sn, 0.0), c(cs, 0.0)]]
}

pub fn rz(t: f64) -> Dense {
    vec![
        vec![c((t / 2.0).cos(), -(t / 2.0).sin()), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c((t / 2.0).cos(), (t / 2.0).sin())],
    ]
}

/// `u` on qubit `q` of an `n`-qubit register, qubit 0 leftmost in the
/// Kronecker product.
pub fn on_qubit(u: &Dense, q: usize, n: usize) -> Dense {
    let id = identity(2);
    let mut out = vec![vec![c(1.0, 0.0)]];
    for k in 0..n {
        out = kron(&out, if k == q { u } else { &id });
    }
    out
}

/// CNOT as |0⟩⟨0|⊗I + |1⟩⟨1|⊗X placed by Kronecker products.
pub fn cnot(control: usize, target: usize, n: usize) -> Dense {
    let p0 = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]];
    let p1 = vec![vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
    let x = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
    let id = identity(2);
    let mut a = vec![vec![c(1.0, 0.0)]];
    let mut b = vec![vec![c(1.0, 0.0)]];
    for k in 0..n {
        let (fa, fb) = if k == control {
            (&p0, &p1)
        } else if k == target {
            (&id, &x)
        } else {
            (&id, &id)
        };
        a = kron(&a, fa);
        b = kron(&b, fb);
    }
    a.iter()
        .zip(&b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

/// Dense unitary of the RY/CNOT-ring ansatz (layer-major thetas).
pub fn ansatz_unitary(thetas: &[f64], n: usize) -> Dense {
    let mut u = identity(1 << n);
    for layer in thetas.chunks(n) {
        for (q, &t) in layer.iter().enumerate() {
            u = matmul(&on_qubit(&ry(t), q, n), &u);
        }
        if n > 1 {
            for q in 0..n {
                u = matmul(&cnot(q, (q + 1) % n, n), &u);
            }
        }
    }
    u
}

/// Dense unitary of the readout layer: per qubit RX(x)·RY(y)·RZ(z).
pub fn readout_unitary(angles: &[[f64; 3]], n: usize) -> Dense {
    let mut u = identity(1 << n);
    for (q, a) in angles.iter().enumerate() {
        let local = matmul(&rx(a[0]), &matmul(&ry(a[1]), &rz(a[2])));
        u = matmul(&on_qubit(&local, q, n), &u);
    }
    u
}

/// ⟨Z_q⟩ via the dense diagonal operator.
pub fn z_expectation(state: &[Complex64], q: usize, n: usize) -> f64 {
    let z = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]];
    let op = on_qubit(&z, q, n);
    let applied = matvec(&op, state);
    state
        .iter()
        .zip(&applied)
        .map(|(a, b)| (a.conj() * b).re)
        .sum()
}

pub fn normalize(x: &[f64], n: usize) -> Vec<Complex64> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut out = vec![c(0.0, 0.0); 1 << n];
    for (o, v) in out.iter_mut().zip(x) {
        *o = c(v / norm, 0.0);
    }
    out
}

/// Straight-line GENConv forward on raw arrays: flat parameters in the
/// documented order, eps = 1e-7. Returns (node scalars, edge scalars in
/// input order).
pub fn genconv_reference(
    nodes: &[[f64; 7]; 5],
    edges: &[(usize, usize, [f64; 4])],
    flat: &[f64],
    h: usize,
) -> ([f64; 5], Vec<f64>) {
    let mut off = 0;
    let mut next = |len: usize| {
        let s = flat[off..off + len].to_vec();
        off += len;
        s
    };
    let we = next(4 * h);
    let be = next(h);
    let wn = next(7 * h);
    let bn = next(h);
    let beta = next(1)[0];
    let s = next(1)[0];
    let wu = next(h * h);
    let bu = next(h);
    let wh = next(h);
    let bh = next(1)[0];
    let wx = next(4);
    let bx = next(1)[0];

    let lin = |w: &[f64], b: &[f64], x: &[f64], out: usize| -> Vec<f64> {
        let inp = x.len();
        (0..out)
            .map(|o| {
                let mut acc = b[o];
                for i in 0..inp {
                    acc += w[o * inp + i] * x[i];
                }
                acc
            })
            .collect()
    };

    let hid: Vec<Vec<f64>> = nodes.iter().map(|x| lin(&wn, &bn, x, h)).collect();
    let enc: Vec<Vec<f64>> = edges.iter().map(|e| lin(&we, &be, &e.2, h)).collect();
    let mut node_out = [0.0; 5];
    for v in 0..5 {
        let mut msgs = Vec::new();
        for (k, e) in edges.iter().enumerate() {
            let u = if e.0 == v {
                e.1
            } else if e.1 == v {
                e.0
            } else {
                continue;
            };
            let m: Vec<f64> = (0..h)
                .map(|d| f64::max(hid[u][d] + enc[k][d], 0.0) + 1e-7)
                .collect();
            msgs.push(m);
        }
        let mut agg = vec![0.0; h];
        if !msgs.is_empty() {
            for d in 0..h {
                let mx = msgs.iter().map(|m| beta * m[d]).fold(f64::MIN, f64::max);
                let ws: Vec<f64> = msgs.iter().map(|m| (beta * m[d] - mx).exp()).collect();
                let tot: f64 = ws.iter().sum();
                agg[d] = msgs.iter().zip(&ws).map(|(m, w)| w * m[d]).sum::<f64>() / tot;
            }
        }
        let hn = hid[v].iter().map(|x| x * x).sum::<f64>().sqrt();
        let mn = agg.iter().map(|x| x * x).sum::<f64>().sqrt();
        let pre: Vec<f64> = (0..h)
            .map(|d| {
                if mn < 1e-12 {
                    hid[v][d]
                } else {
                    hid[v][d] + s * hn * agg[d] / mn
                }
            })
            .collect();
        let upd: Vec<f64> = lin(&wu, &bu, &pre, h).into_iter().map(|x| x.max(0.0)).collect();
        node_out[v] = lin(&wh, &[bh], &upd, 1)[0];
    }
    let edge_out = edges.iter().map(|e| lin(&wx, &[bx], &e.2, 1)[0]).collect();
    (node_out, edge_out)
}
