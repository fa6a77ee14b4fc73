use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use si2e_rl::env::{builtin_map, GridworldSpec};
use si2e_rl::{load_env, Mdp};

/// Independent BFS over the raw character map; returns the cell path.
fn bfs_path(map: &str) -> Option<Vec<(usize, usize)>> {
    let grid: Vec<Vec<char>> = map.lines().map(str::trim).filter(|l| !l.is_empty()).map(|l| l.chars().collect()).collect();
    let (h, w) = (grid.len(), grid[0].len());
    let find = |c| (0..h).flat_map(|r| (0..w).map(move |q| (r, q))).find(|&(r, q)| grid[r][q] == c);
    let (start, goal) = (find('S')?, find('G')?);
    let mut prev = vec![vec![None; w]; h];
    let mut seen = vec![vec![false; w]; h];
    seen[start.0][start.1] = true;
    let mut queue = VecDeque::from([start]);
    while let Some((r, c)) = queue.pop_front() {
        if (r, c) == goal {
            let mut path = vec![goal];
            while let Some(p) = prev[path.last().unwrap().0][path.last().unwrap().1] {
                path.push(p);
            }
            path.reverse();
            return Some(path);
        }
        let steps = [(r.wrapping_sub(1), c), (r + 1, c), (r, c.wrapping_sub(1)), (r, c + 1)];
        for (nr, nc) in steps {
            if nr < h && nc < w && grid[nr][nc] != '#' && !seen[nr][nc] {
                seen[nr][nc] = true;
                prev[nr][nc] = Some((r, c));
                queue.push_back((nr, nc));
            }
        }
    }
    None
}

fn rollout(mdp: &Mdp, actions: &[usize], seed: u64) -> Vec<(usize, f64, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = mdp.reset();
    actions
        .iter()
        .map(|&a| {
            let step = mdp.step(s, a, &mut rng).unwrap();
            s = if step.terminal { mdp.reset() } else { step.next };
            (step.next, step.reward, step.terminal)
        })
        .collect()
}

#[test]
fn four_rooms_path_crosses_a_doorway() {
    let map = builtin_map("four_rooms").unwrap();
    let path = bfs_path(map).expect("goal reachable");
    let spec = GridworldSpec::parse(map).unwrap();
    assert_eq!(spec.shortest_path(), Some(path.len() - 1));
    // doorways are the open cells on the dividing row and column
    let doorways = [(2, 4), (4, 2), (4, 6), (6, 4)];
    for &(r, c) in &doorways {
        assert!(!spec.walls[r * spec.width + c]);
    }
    assert!(path.iter().any(|p| doorways.contains(p)));
}

#[test]
fn empty_room_shortest_path_is_manhattan() {
    let spec = GridworldSpec::parse(builtin_map("empty5").unwrap()).unwrap();
    assert_eq!(spec.shortest_path(), Some(8));
    assert_eq!(bfs_path(builtin_map("empty5").unwrap()).unwrap().len() - 1, 8);
}

#[test]
fn random_steps_stay_in_range_and_episodes_respect_cap() {
    for name in ["figure1", "empty5", "four_rooms", "doorkey"] {
        let mdp = load_env(name).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut s = mdp.reset();
        let (mut len, mut ep_reward) = (0, 0.0);
        for _ in 0..1000 {
            let step = mdp.step(s, rng.gen_range(0..mdp.action_count()), &mut rng).unwrap();
            assert!(step.next < mdp.state_count());
            assert!(step.reward == 0.0 || step.reward == 1.0);
            ep_reward += step.reward;
            len += 1;
            if step.terminal || len >= mdp.step_cap() {
                assert!(len <= mdp.step_cap());
                assert!(ep_reward == 0.0 || ep_reward == 1.0, "{name}");
                s = mdp.reset();
                len = 0;
                ep_reward = 0.0;
            } else {
                s = step.next;
            }
        }
    }
}

#[test]
fn identical_seeds_and_actions_give_identical_trajectories() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let actions: Vec<usize> = (0..500).map(|_| rng.gen_range(0..4)).collect();
    for name in ["figure1", "four_rooms", "doorkey"] {
        let mdp = load_env(name).unwrap();
        assert_eq!(rollout(&mdp, &actions, 11), rollout(&mdp, &actions, 11));
    }
}

#[test]
fn missing_map_is_an_error() {
    assert!(load_env("/nonexistent/map.txt").is_err());
}
