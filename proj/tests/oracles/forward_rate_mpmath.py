# High-precision (40-digit mpmath) oracle for h*F(E)/Delta with Delta = 1.
# Frozen outputs live in tests/unit/test_junction.cpp.
import mpmath as mp
mp.mp.dps=40
def Fdimless(E,g,kT):
    E=mp.mpf(E); g=mp.mpf(g); kT=mp.mpf(kT)
    def ns(eps):
        z=mp.mpc(eps,g)
        return abs(mp.re(z/mp.sqrt((z-1)*(z+1))))
    f=lambda x: 1/(mp.exp(x/kT)+1)
    occ=lambda e: f(e-E)*f(-e)
    lo=min(0,E)-60*kT; hi=max(0,E)+60*kT
    pts={lo,hi,mp.mpf(0),E}
    for c in (mp.mpf(0),E):
        d=kT
        while d<hi-lo:
            pts.add(c-d); pts.add(c+d); d*=2
    for edge in (-1,1):
        if lo<edge<hi:
            pts.add(mp.mpf(edge))
            d=g
            while d<0.5:
                pts.add(edge-d); pts.add(edge+d); d*=4
    pts=sorted(p for p in pts if lo<=p<=hi)
    tot=mp.mpf(0)
    for a,b in zip(pts[:-1],pts[1:]):
        tot+=mp.quad(lambda e: ns(e)*occ(e),[a,b])
    return tot
kB=mp.mpf('1.380649e-23'); h=mp.mpf('6.62607015e-34'); D=h*mp.mpf('50e9')
for g in ['1e-3','1e-4']:
  kT=kB*mp.mpf('0.1')/D
  for E in ['-0.8','-0.2','0.2','0.95','1.3','3.0']:
    print(g,E,mp.nstr(Fdimless(mp.mpf(E),mp.mpf(g),kT),20))
