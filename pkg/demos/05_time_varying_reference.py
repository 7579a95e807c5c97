"""Tracking a moving target: the feature rides a 0.1-radius circle.

The depth estimate converges at the same speed as with a constant target,
while the feature follows the time-varying reference to sub-millinormalized
accuracy once the transient dies out.
"""

import numpy as np

from adepth import ScenarioConfig, depth_convergence_time, run_scenario, reference_circular

cfg = ScenarioConfig(
    name="circle",
    strategy="case_a",
    reference_type="circular",
    s0=np.array([0.3, 0.0]),
    dt=0.005,
    horizon=40.0,
)
lg = run_scenario(cfg)

print(f"reference at t=0:   {reference_circular(0.0)}")
print(f"reference at t=2.5: {reference_circular(2.5)}  (quarter period)")
print(f"\ndepth error below 5% at t = {depth_convergence_time(lg):.2f} s")

half = lg.n_rows // 2
print(f"tracking error, final half of the run: max ||e|| = {np.max(lg['e_norm'][half:]):.2e}")
print(f"camera path length: "
      f"{np.sum(np.hypot(np.diff(lg['cam_px']), np.hypot(np.diff(lg['cam_py']), np.diff(lg['cam_pz'])))):.2f} m "
      f"(the camera keeps orbiting to stay excited)")
print("\nimage-plane positions every 2.5 s of the last period:")
for t in np.arange(30.0, 40.0, 2.5):
    k = int(round(t / cfg.dt))
    print(f"  t={t:5.1f}  s=({lg['x'][k]:+.4f}, {lg['y'][k]:+.4f})"
          f"  s_des=({lg['s_des_x'][k]:+.4f}, {lg['s_des_y'][k]:+.4f})")
