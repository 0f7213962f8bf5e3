import numpy as np, time, json
from greenbie import geometry as G, kernels as K, training as T, oracle as O, green_solver as GS

op = K.OperatorSpec("poisson")
dom = G.DomainSpec("interior", (G.make_circle(1.0,(0,0),96),))
cfg = T.TrainingConfig(epochs=10000, resample_every=500, n_x=80, lr=1e-5, seed=0,
                       blocks=8, width=100, activation="relu", dtype="float32")
t0=time.time()
model = T.train_bi(cfg, op, dom)
dt=time.time()-t0
model.eval_curves = (G.make_circle(1.0,(0,0),800),)
rng = np.random.default_rng(123)
gx, gy = np.meshgrid(np.arange(-0.9,0.95,0.1), np.arange(-0.9,0.95,0.1))
grid = np.column_stack([gx.ravel(), gy.ravel()])
grid = grid[np.linalg.norm(grid,axis=1) < 0.98]
errs=[]
for _ in range(20):
    x = rng.uniform(-0.95,0.95,2)
    while np.linalg.norm(x) > 0.9: x = rng.uniform(-0.95,0.95,2)
    gsel = grid[np.linalg.norm(grid-x,axis=1)>1e-6]
    g = GS.eval_green_grid(model, x, gsel).real
    ge = O.disc_green_exact(x, gsel)
    errs.append(float(np.linalg.norm(g-ge)/np.linalg.norm(ge)))
out = dict(train_s=dt, ms_per_epoch=dt/cfg.epochs*1000,
           loss_first=model.loss_trace[0][1], loss_last=model.loss_trace[-1][1],
           mean_err=float(np.mean(errs)), max_err=float(np.max(errs)))
losses = [l for _,l,_ in model.loss_trace]
out["loss_at"] = {str(e): losses[e] for e in [0, 500, 1000, 2000, 4000, 6000, 8000, 9999]}
print(json.dumps(out, indent=1))
with open(".calib/disc_calib.json","w") as f: json.dump(out, f)
