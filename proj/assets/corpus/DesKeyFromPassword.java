package mini;

import java.security.SecureRandom;
import javax.crypto.SecretKey;
import javax.crypto.SecretKeyFactory;
import javax.crypto.spec.DESKeySpec;

public class DesKeyFromPassword {

    /** Builds a des key from the password bytes. */
    public SecretKey buildKey(byte[] password) throws Exception {
        SecureRandom random = SecureRandom.getInstance("SHA1PRNG");
        random.nextBytes(password);
        DESKeySpec spec = new DESKeySpec(password);
        SecretKeyFactory factory = SecretKeyFactory.getInstance("DES");
        return factory.generateSecret(spec);
    }
}
