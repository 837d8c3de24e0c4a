//! Test-only reference implementations.
//!
//! Everything here works on raw string rows and deliberately shares no code
//! with the library: classes come from pairwise row comparison, metrics from
//! direct evaluation of their definitions, and ordered EMD from a min-cost
//! flow solver.

#![allow(dead_code)]

use anonaudit::{Dataset, LoadOptions, SaMode};
use rand::seq::SliceRandom;
use rand::Rng;

pub const MISSING: &str = "?";

#[derive(Debug, Clone)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    pub fn dataset(&self) -> Dataset {
        Dataset::from_rows(
            self.header.iter().cloned(),
            self.rows.iter().cloned(),
            &LoadOptions::default(),
        )
        .expect("generated tables are well formed")
    }

    pub fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).unwrap()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn as_real(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Numeric iff every cell is a finite real and none is the missing token.
pub fn is_numeric(table: &RawTable, col: usize) -> bool {
    !table.rows.is_empty()
        && table
            .rows
            .iter()
            .all(|r| r[col] != MISSING && as_real(&r[col]).is_some())
}

fn cells_equal(a: &str, b: &str, numeric: bool) -> bool {
    if numeric {
        as_real(a) == as_real(b)
    } else {
        a == b
    }
}

/// Classes by O(n^2) pairwise comparison; each class lists its rows ascending.
pub fn brute_partition(table: &RawTable, cols: &[usize]) -> Vec<Vec<usize>> {
    let numeric: Vec<bool> = cols.iter().map(|&c| is_numeric(table, c)).collect();
    let same = |a: usize, b: usize| {
        cols.iter()
            .zip(&numeric)
            .all(|(&c, &num)| cells_equal(&table.rows[a][c], &table.rows[b][c], num))
    };
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for row in 0..table.rows.len() {
        match classes.iter_mut().find(|class| same(class[0], row)) {
            Some(class) => class.push(row),
            None => classes.push(vec![row]),
        }
    }
    classes
}

/// (value, count) pairs over `rows` for column `col`, using column equality.
fn tally(table: &RawTable, rows: &[usize], col: usize, numeric: bool) -> Vec<(String, usize)> {
    let mut out: Vec<(String, usize)> = Vec::new();
    for &r in rows {
        let v = &table.rows[r][col];
        match out.iter_mut().find(|(u, _)| cells_equal(u, v, numeric)) {
            Some((_, n)) => *n += 1,
            None => out.push((v.clone(), 1)),
        }
    }
    out
}

/// Optional-c is compared exactly, reals within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMetrics {
    pub k: usize,
    pub alpha: f64,
    pub alpha_k: usize,
    pub l: usize,
    pub entropy_l: usize,
    pub c: Option<usize>,
    pub recursive_l: usize,
    pub beta: f64,
    pub t: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSa {
    pub k: usize,
    pub alpha: f64,
    pub l: usize,
    pub entropy_l: usize,
    pub c: Option<usize>,
    pub beta: f64,
    pub cap_violations: usize,
    pub t: f64,
    pub delta: f64,
}

pub fn oracle_sa(table: &RawTable, grouping: &[usize], sa: usize) -> OracleSa {
    let numeric = is_numeric(table, sa);
    let n = table.rows.len();
    let all: Vec<usize> = (0..n).collect();
    let mut global = tally(table, &all, sa, numeric);
    if numeric {
        global.sort_by(|a, b| {
            as_real(&a.0)
                .unwrap()
                .partial_cmp(&as_real(&b.0).unwrap())
                .unwrap()
        });
    }
    let p: Vec<f64> = global.iter().map(|(_, c)| *c as f64 / n as f64).collect();

    let classes = brute_partition(table, grouping);
    let mut k = usize::MAX;
    let mut alpha: f64 = 0.0;
    let mut l = usize::MAX;
    let mut min_h = f64::INFINITY;
    let mut beta: f64 = 0.0;
    let mut cap_violations = 0;
    let mut t: f64 = 0.0;
    let mut delta: f64 = 0.0;
    let mut sorted_counts = Vec::new();

    for class in &classes {
        let size = class.len();
        let local = tally(table, class, sa, numeric);
        k = k.min(size);
        l = l.min(local.len());
        let q: Vec<f64> = global
            .iter()
            .map(|(v, _)| {
                local
                    .iter()
                    .find(|(u, _)| cells_equal(u, v, numeric))
                    .map_or(0.0, |(_, c)| *c as f64 / size as f64)
            })
            .collect();
        let mut h = 0.0;
        for (&pi, &qi) in p.iter().zip(&q) {
            if qi > 0.0 {
                alpha = alpha.max(qi);
                h -= qi * qi.ln();
                delta = delta.max((qi / pi).ln().abs());
            }
            if qi > pi {
                let d = (qi - pi) / pi;
                beta = beta.max(d);
                if d > -pi.ln() {
                    cap_violations += 1;
                }
            }
        }
        min_h = min_h.min(h);
        let dist = if numeric {
            let m = p.len();
            let cost = |i: usize, j: usize| {
                if m == 1 {
                    0.0
                } else {
                    (i as f64 - j as f64).abs() / (m - 1) as f64
                }
            };
            min_cost_transport(&p, &q, cost)
        } else {
            0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>()
        };
        t = t.max(dist);
        let mut counts: Vec<usize> = local.iter().map(|(_, c)| *c).collect();
        counts.sort_by(|a, b| b.cmp(a));
        sorted_counts.push(counts);
    }

    let mut entropy_l = 1;
    while ((entropy_l + 1) as f64).ln() <= min_h + 1e-12 {
        entropy_l += 1;
    }

    let c = if l < 2 {
        None
    } else {
        let mut worst = 0;
        for counts in &sorted_counts {
            let tail: usize = counts[l - 1..].iter().sum();
            let mut c = 1;
            while counts[0] >= c * tail {
                c += 1;
            }
            worst = worst.max(c);
        }
        Some(worst)
    };

    OracleSa {
        k,
        alpha,
        l,
        entropy_l,
        c,
        beta,
        cap_violations,
        t,
        delta,
    }
}

pub fn oracle_groupings(qi: &[usize], sa: &[usize], mode: SaMode) -> Vec<Vec<usize>> {
    sa.iter()
        .map(|&s| {
            let mut g = qi.to_vec();
            if mode == SaMode::QiUpdate {
                g.extend(sa.iter().copied().filter(|&o| o != s));
            }
            g
        })
        .collect()
}

pub fn oracle_metrics(table: &RawTable, qi: &[usize], sa: &[usize], mode: SaMode) -> OracleMetrics {
    let k = brute_partition(table, qi)
        .iter()
        .map(Vec::len)
        .min()
        .unwrap();
    let per: Vec<OracleSa> = sa
        .iter()
        .zip(oracle_groupings(qi, sa, mode))
        .map(|(&s, g)| oracle_sa(table, &g, s))
        .collect();
    let l = per.iter().map(|m| m.l).min().unwrap();
    let c = if l < 2 {
        None
    } else {
        per.iter().filter_map(|m| m.c).max()
    };
    OracleMetrics {
        k,
        alpha: per.iter().map(|m| m.alpha).fold(0.0, f64::max),
        alpha_k: per.iter().map(|m| m.k).min().unwrap(),
        l,
        entropy_l: per.iter().map(|m| m.entropy_l).min().unwrap(),
        c,
        recursive_l: l,
        beta: per.iter().map(|m| m.beta).fold(0.0, f64::max),
        t: per.iter().map(|m| m.t).fold(0.0, f64::max),
        delta: per.iter().map(|m| m.delta).fold(0.0, f64::max),
    }
}

/// Minimum cost of moving distribution `p` onto `q` with per-unit `cost(i, j)`,
/// by successive shortest paths on the bipartite transport network.
pub fn min_cost_transport(p: &[f64], q: &[f64], cost: impl Fn(usize, usize) -> f64) -> f64 {
    const EPS: f64 = 1e-15;
    let m = p.len();
    assert_eq!(m, q.len());
    let source = 2 * m;
    let sink = 2 * m + 1;
    let nodes = 2 * m + 2;

    struct Edge {
        to: usize,
        cap: f64,
        cost: f64,
    }
    let mut edges: Vec<Edge> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let add = |edges: &mut Vec<Edge>,
               adj: &mut Vec<Vec<usize>>,
               a: usize,
               b: usize,
               cap: f64,
               cost: f64| {
        adj[a].push(edges.len());
        edges.push(Edge { to: b, cap, cost });
        adj[b].push(edges.len());
        edges.push(Edge {
            to: a,
            cap: 0.0,
            cost: -cost,
        });
    };
    for i in 0..m {
        add(&mut edges, &mut adj, source, i, p[i], 0.0);
        add(&mut edges, &mut adj, m + i, sink, q[i], 0.0);
        for j in 0..m {
            add(&mut edges, &mut adj, i, m + j, f64::INFINITY, cost(i, j));
        }
    }

    let mut total = 0.0;
    for _ in 0..10_000 {
        // Bellman-Ford on the residual graph
        let mut dist = vec![f64::INFINITY; nodes];
        let mut via: Vec<Option<usize>> = vec![None; nodes];
        dist[source] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for u in 0..nodes {
                if dist[u] == f64::INFINITY {
                    continue;
                }
                for &e in &adj[u] {
                    let edge = &edges[e];
                    if edge.cap > EPS && dist[u] + edge.cost < dist[edge.to] - 1e-15 {
                        dist[edge.to] = dist[u] + edge.cost;
                        via[edge.to] = Some(e);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[sink] == f64::INFINITY {
            break;
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = sink;
        while let Some(e) = via[v] {
            bottleneck = bottleneck.min(edges[e].cap);
            v = edges[e ^ 1].to;
        }
        if bottleneck <= EPS {
            break;
        }
        let mut v = sink;
        while let Some(e) = via[v] {
            edges[e].cap -= bottleneck;
            edges[e ^ 1].cap += bottleneck;
            total += bottleneck * edges[e].cost;
            v = edges[e ^ 1].to;
        }
    }
    total
}

/// Shape parameters for [`random_table`].
#[derive(Debug, Clone, Copy)]
pub struct TableShape {
    pub max_rows: usize,
    pub max_qi: usize,
    pub max_sa: usize,
    pub max_alphabet: usize,
}

impl Default for TableShape {
    fn default() -> Self {
        TableShape {
            max_rows: 200,
            max_qi: 4,
            max_sa: 2,
            max_alphabet: 5,
        }
    }
}

/// A random table with columns `q0..` (QI) then `s0..` (SA). Each column is
/// numeric or categorical at random; numeric columns sometimes spell the same
/// number two ways.
pub fn random_table<R: Rng>(
    rng: &mut R,
    shape: TableShape,
) -> (RawTable, Vec<String>, Vec<String>) {
    let n = rng.gen_range(1..=shape.max_rows);
    let n_qi = rng.gen_range(1..=shape.max_qi);
    let n_sa = rng.gen_range(1..=shape.max_sa);
    let mut header = Vec::new();
    let mut alphabets = Vec::new();
    for i in 0..n_qi + n_sa {
        header.push(if i < n_qi {
            format!("q{i}")
        } else {
            format!("s{}", i - n_qi)
        });
        let size = rng.gen_range(1..=shape.max_alphabet);
        let numeric = rng.gen_bool(0.5);
        let mut alphabet: Vec<Vec<String>> = (0..size)
            .map(|v| {
                if numeric {
                    let base = (v as i64 * 7 - 3).to_string();
                    if rng.gen_bool(0.3) {
                        vec![base.clone(), format!("{base}.0")]
                    } else {
                        vec![base]
                    }
                } else {
                    vec![["red", "green", "blue", "cyan", "gold"][v].to_string()]
                }
            })
            .collect();
        alphabet.shuffle(rng);
        alphabets.push(alphabet);
    }
    let rows = (0..n)
        .map(|_| {
            alphabets
                .iter()
                .map(|alphabet| {
                    let spellings = &alphabet[rng.gen_range(0..alphabet.len())];
                    spellings[rng.gen_range(0..spellings.len())].clone()
                })
                .collect()
        })
        .collect();
    let qi = header[..n_qi].to_vec();
    let sa = header[n_qi..].to_vec();
    (RawTable { header, rows }, qi, sa)
}

pub fn indices(table: &RawTable, names: &[String]) -> Vec<usize> {
    names.iter().map(|n| table.col(n)).collect()
}

pub fn d4() -> RawTable {
    RawTable {
        header: vec!["g".into(), "d".into()],
        rows: [["A", "x"], ["A", "y"], ["B", "x"], ["B", "x"]]
            .iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect(),
    }
}
