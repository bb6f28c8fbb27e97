"""Independent mpmath oracle for the 8-state four-component model."""
import mpmath as mp
mp.mp.dps = 160

ROWS = ["11111111","11111111","11110000","11111100","11001111","11111111","11111111","11111111"]

def phi(i, j, e):
    # 1-based states
    blk = lambda s: (s - 1) // 2
    if (i, j) == (4, 3): return mp.log(mp.mpf(11)/10*e + 1)
    if (i, j) == (4, 4): return mp.log(mp.mpf(11)/10*e + 2)
    if blk(i) == blk(j):
        return mp.log(2) if i == j else mp.mpf(0)
    if (i, j) in [(4,5),(4,6)]: return 4*mp.log(e)
    if (i, j) in [(5,7),(6,7),(7,6),(8,6)]: return mp.log(e/10)
    return mp.log(e)

def W(e):
    return mp.matrix([[mp.exp(phi(i+1,j+1,e)) if ROWS[i][j]=='1' else 0 for j in range(8)] for i in range(8)])

def perron(M):
    ev, er = mp.eig(M)
    k = max(range(len(ev)), key=lambda t: mp.re(ev[t]))
    lam = mp.re(ev[k])
    v = [mp.re(er[t, k]) for t in range(M.rows)]
    s = sum(v); v = [x/s for x in v]
    evl, el = mp.eig(M.T)
    kl = max(range(len(evl)), key=lambda t: mp.re(evl[t]))
    u = [mp.re(el[t, kl]) for t in range(M.rows)]
    d = sum(a*b for a, b in zip(u, v)); u = [x/d for x in u]
    return lam, v, u  # lam, right (sum 1), left (u.v = 1)

def sub(M, idx):
    return mp.matrix([[M[i, j] for j in idx] for i in idx])

COMP = [[0,1],[2,3],[4,5],[6,7]]

def mv(e):
    Wf = W(e)
    lam, nu, h = perron(Wf)
    hs = []
    for c in COMP:
        l, v, u = perron(sub(Wf, c)); hs.append(u)
    m = mp.matrix(4, 4)
    for a in range(4):
        for b in range(4):
            if a == b:
                m[a, b] = perron(sub(Wf, COMP[a]))[0]; continue
            num = sum(nu[j]*sum(Wf[i, j]*hs[a][ii] for ii, i in enumerate(COMP[a])) for j in COMP[b])
            den = sum(nu[j]*hs[b][jj] for jj, j in enumerate(COMP[b]))
            m[a, b] = num/den
    return m, lam, nu, h

def lam_sub(Wf, comps):
    idx = [s for c in comps for s in COMP[c]]
    return perron(sub(Wf, idx))[0]

if __name__ == "__main__":
    for e in [mp.mpf('1e-2'), mp.mpf('1e-3')]:
        m, lam, nu, h = mv(e)
        print("eps", e)
        print(" mV", [[mp.nstr(m[a,b], 20) for b in range(4)] for a in range(4)])
        print(" perron(mV)-lam", mp.nstr(perron(m)[0]-lam, 5))
        print(" nu", [mp.nstr(x, 20) for x in nu])
        print(" h ", [mp.nstr(x, 20) for x in h])
        g = nu; print(" display(3,4) with nu", mp.nstr(e/5*(g[6]+10*g[7])/(g[6]+g[7]),20), "with h", mp.nstr(e/5*(h[6]+10*h[7])/(h[6]+h[7]),20))
        print(" display(4,3) with nu", mp.nstr(e/5*(10*g[4]+g[5])/(g[4]+g[5]),20), "with h", mp.nstr(e/5*(10*h[4]+h[5])/(h[4]+h[5]),20))
        print(" lam_full", mp.nstr(lam, 30))
    for k in range(4, 9):
        e = mp.mpf(10)**(-k)
        Wf = W(e)
        l234 = lam_sub(Wf, [1,2,3]); l2 = lam_sub(Wf, [1])
        m = mv(e)[0]
        lv234 = perron(sub(m, [1,2,3]))[0]; lv2 = m[1,1]
        R = (l234-l2)/(lv234-lv2)
        print(k, "l2-(3+1.1e)", mp.nstr(l2-3-mp.mpf(11)/10*e,5), "l234 resid/e^2.5", mp.nstr((l234-3-mp.mpf(11)/10*e-mp.sqrt(6)/2*e**mp.mpf(2.5))/e**mp.mpf(2.5),6),
              "lv diff/e^3", mp.nstr((lv234-lv2)/e**3, 10), "R", mp.nstr(R, 10), "R*sqrt(e)", mp.nstr(R*mp.sqrt(e), 8))
    c = mp.cos(mp.atan(180*mp.sqrt(1273610)/101269)/3)
    print("const", mp.nstr(mp.mpf(20)/3*(14884*c**2+9028*c+2035)/(14884*c**2+5368*c-605), 12))
