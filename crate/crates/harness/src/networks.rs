//! Built-in road networks and the tasks the experiments run on.

use famsec_core::delivery::{DeliveryTask, GeneratorKind, Rewards, RoadNetwork, TaskParams};

/// 13-node street network used by experiments 1, 3 and 4.
///
/// ```text
///  0 - 1 - 2 - 3
///  |   |       |
///  4 - 5 - 6 - 7
///  |   |   |   |
///  8 - 9 - 10- 11 - 12
/// ```
pub fn small_network() -> RoadNetwork {
    const EDGES: [(usize, usize); 17] = [
        (0, 1),
        (1, 2),
        (2, 3),
        (0, 4),
        (1, 5),
        (3, 7),
        (4, 5),
        (5, 6),
        (6, 7),
        (5, 9),
        (6, 10),
        (7, 11),
        (4, 8),
        (8, 9),
        (9, 10),
        (10, 11),
        (11, 12),
    ];
    let layout = vec![
        [0.0, 2.0],
        [1.0, 2.0],
        [2.0, 2.0],
        [3.0, 2.0],
        [0.0, 1.0],
        [1.0, 1.0],
        [2.0, 1.0],
        [3.0, 1.0],
        [0.0, 0.0],
        [1.0, 0.0],
        [2.0, 0.0],
        [3.0, 0.0],
        [4.0, 0.0],
    ];
    RoadNetwork::new(13, &EDGES, GeneratorKind::Manual)
        .and_then(|n| n.with_layout(layout))
        .expect("built-in network is valid")
}

const GRID_ROWS: usize = 5;
const GRID_COLS: usize = 9;

/// 45-node street grid (5 × 9) with six blocked street segments, used by
/// experiment 2.
pub fn medium_network() -> RoadNetwork {
    let id = |r: usize, c: usize| r * GRID_COLS + c;
    let blocked = [
        ((1, 2), (2, 2)),
        ((1, 3), (2, 3)),
        ((1, 4), (2, 4)),
        ((2, 6), (3, 6)),
        ((3, 5), (3, 6)),
        ((0, 6), (1, 6)),
    ];
    let mut edges = Vec::new();
    for r in 0..GRID_ROWS {
        for c in 0..GRID_COLS {
            if c + 1 < GRID_COLS && !blocked.contains(&((r, c), (r, c + 1))) {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < GRID_ROWS && !blocked.contains(&((r, c), (r + 1, c))) {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    let layout = (0..GRID_ROWS * GRID_COLS)
        .map(|v| [(v % GRID_COLS) as f64, (GRID_ROWS - 1 - v / GRID_COLS) as f64])
        .collect();
    RoadNetwork::new(GRID_ROWS * GRID_COLS, &edges, GeneratorKind::Manual)
        .and_then(|n| n.with_layout(layout))
        .expect("built-in network is valid")
}

/// A 14-node corridor: the goal is 13 hops from the truck.
pub fn corridor_network() -> RoadNetwork {
    let edges: Vec<(usize, usize)> = (0..13).map(|i| (i, i + 1)).collect();
    let layout = (0..14).map(|i| [i as f64, 0.0]).collect();
    RoadNetwork::new(14, &edges, GeneratorKind::Manual)
        .and_then(|n| n.with_layout(layout))
        .expect("built-in network is valid")
}

fn task(network: RoadNetwork, params: TaskParams) -> DeliveryTask {
    DeliveryTask::new(network, params).expect("built-in task is valid")
}

/// Experiment 1: small network, `p_trans = 0.7`, `γ = 0.9`.
pub fn exp1_task() -> DeliveryTask {
    task(
        small_network(),
        TaskParams {
            adt_start: 0,
            mg_start: 10,
            goal: 12,
            p_trans: 0.7,
            gamma: 0.9,
            ..TaskParams::default()
        },
    )
}

/// Experiment 2: medium grid, `p_trans = 0.7`, `γ = 0.95`.
pub fn exp2_task() -> DeliveryTask {
    task(
        medium_network(),
        TaskParams {
            adt_start: 9,
            mg_start: 40,
            goal: 34,
            p_trans: 0.7,
            gamma: 0.95,
            ..TaskParams::default()
        },
    )
}

/// Experiments 3 and 4: small network, `γ = 0.95`, loiter penalty −100,
/// with the given `p_trans`.
pub fn exp3_task(p_trans: f64) -> DeliveryTask {
    task(
        small_network(),
        TaskParams {
            adt_start: 0,
            mg_start: 10,
            goal: 12,
            p_trans,
            gamma: 0.95,
            rewards: Rewards {
                loiter: -100.0,
                ..Rewards::default()
            },
            ..TaskParams::default()
        },
    )
}

/// The three environments of the difficulty experiment, easiest last:
/// the corridor (no way to finish with a non-negative reward), the small
/// network with the pursuer guarding the goal, and the small network with
/// a goal two hops away and the pursuer across the map.
pub fn difficulty_tasks() -> [(&'static str, DeliveryTask); 3] {
    [
        (
            "impossible",
            task(
                corridor_network(),
                TaskParams {
                    adt_start: 0,
                    mg_start: 7,
                    goal: 13,
                    p_trans: 0.7,
                    ..TaskParams::default()
                },
            ),
        ),
        (
            "hard",
            task(
                small_network(),
                TaskParams {
                    adt_start: 0,
                    mg_start: 10,
                    goal: 12,
                    p_trans: 0.7,
                    ..TaskParams::default()
                },
            ),
        ),
        (
            "easy",
            task(
                small_network(),
                TaskParams {
                    adt_start: 0,
                    mg_start: 12,
                    goal: 2,
                    p_trans: 0.9,
                    ..TaskParams::default()
                },
            ),
        ),
    ]
}
