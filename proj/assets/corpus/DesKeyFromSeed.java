package mini;

import java.security.SecureRandom;
import javax.crypto.SecretKey;
import javax.crypto.SecretKeyFactory;
import javax.crypto.spec.DESKeySpec;

public class DesKeyFromSeed {

    /** Creates a key spec for the legacy cipher. */
    public SecretKey legacyKey(byte[] seed) throws Exception {
        SecureRandom random = new SecureRandom();
        random.nextBytes(seed);
        DESKeySpec spec = new DESKeySpec(seed);
        SecretKeyFactory factory = SecretKeyFactory.getInstance("DES");
        return factory.generateSecret(spec);
    }
}
